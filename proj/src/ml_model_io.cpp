#include "fgml/ml.hpp"
#include "fgml/numio.hpp"

#include <fstream>
#include <sstream>

namespace fgml::ml {

namespace {

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += " ";
        out += format_double(v[i]);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        double v;
        if (!try_parse_double(tok, v))
            throw MlError(std::string("bad number in model ") + what);
        out.push_back(v);
    }
    return out;
}

struct LineReader {
    std::istringstream body;
    explicit LineReader(std::string text) : body(std::move(text)) {}

    std::string expect(const char* key) {
        std::string l;
        if (!std::getline(body, l))
            throw MlError(std::string("model file: missing '") + key + "' line");
        std::size_t sp = l.find(' ');
        std::string k = sp == std::string::npos ? l : l.substr(0, sp);
        if (k != key)
            throw MlError("model file: expected '" + std::string(key) + "', found '" + k + "'");
        return sp == std::string::npos ? std::string() : l.substr(sp + 1);
    }
};

std::vector<std::string> split_names(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

void save_model(const TrainedModel& model, std::ostream& out) {
    std::ostringstream body;
    body << "FGMODEL 1\n";
    body << "family " << family_name(model.family) << "\n";
    std::string in_names, out_names;
    for (const auto& n : model.input_names) in_names += " " + n;
    for (const auto& n : model.target_names) out_names += " " + n;
    body << "inputs" << in_names << "\n";
    body << "targets" << out_names << "\n";
    body << "in_min " << join_doubles(model.scaler.in_min) << "\n";
    body << "in_max " << join_doubles(model.scaler.in_max) << "\n";
    body << "out_min " << join_doubles(model.scaler.out_min) << "\n";
    body << "out_max " << join_doubles(model.scaler.out_max) << "\n";
    body << "config " << model.config_echo << "\n";
    body << "epochs_run " << model.epochs_run << "\n";
    body << "final_loss " << format_double(model.final_loss) << "\n";

    if (model.family == Family::lr || model.family == Family::mlp) {
        body << "activation " << activation_name(model.activation) << "\n";
        body << "layers";
        for (int s : model.layer_sizes) body << " " << s;
        body << "\n";
        for (std::size_t l = 0; l < model.weights.size(); ++l) {
            body << "W " << l << " " << join_doubles(model.weights[l]) << "\n";
            body << "B " << l << " " << join_doubles(model.biases[l]) << "\n";
        }
    } else if (model.family == Family::rf) {
        for (std::size_t t = 0; t < model.forests.size(); ++t) {
            body << "forest " << t << " " << model.forests[t].size() << "\n";
            for (const auto& tree : model.forests[t]) {
                body << "tree " << tree.nodes.size() << "\n";
                for (const auto& nd : tree.nodes)
                    body << "node " << nd.feature << " " << format_double(nd.threshold) << " "
                         << nd.left << " " << nd.right << " " << format_double(nd.value) << "\n";
            }
        }
    } else {
        for (std::size_t t = 0; t < model.machines.size(); ++t) {
            const auto& mach = model.machines[t];
            body << "svr " << t << " " << (mach.kernel == Kernel::linear ? "linear" : "rbf") << " "
                 << format_double(mach.gamma) << " " << format_double(mach.bias) << " "
                 << mach.coef.size() << "\n";
            for (std::size_t s = 0; s < mach.coef.size(); ++s)
                body << "sv " << format_double(mach.coef[s]) << " "
                     << join_doubles(mach.support[s]) << "\n";
        }
    }

    std::string text = body.str();
    out << text << "hash " << fnv1a64_hex(text) << "\n";
    if (!out) throw MlError("failed while writing the model stream");
}

void save_model(const TrainedModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw MlError("cannot open '" + path + "' for writing");
    save_model(model, out);
}

TrainedModel load_model(std::istream& in) {
    std::string text, line, hash_line;
    while (std::getline(in, line)) {
        if (line.rfind("hash ", 0) == 0) {
            hash_line = line;
            break;
        }
        text += line;
        text += "\n";
    }
    if (hash_line.empty()) throw MlError("model file has no content hash");
    if (hash_line.substr(5) != fnv1a64_hex(text))
        throw MlError("model content hash mismatch");

    LineReader r(text);
    std::string magic;
    std::getline(r.body, magic);
    if (magic != "FGMODEL 1") throw MlError("not a model file (bad magic)");

    TrainedModel model;
    model.family = family_from_name(r.expect("family"));
    model.input_names = split_names(r.expect("inputs"));
    model.target_names = split_names(r.expect("targets"));
    model.scaler.in_min = parse_doubles(r.expect("in_min"), "in_min");
    model.scaler.in_max = parse_doubles(r.expect("in_max"), "in_max");
    model.scaler.out_min = parse_doubles(r.expect("out_min"), "out_min");
    model.scaler.out_max = parse_doubles(r.expect("out_max"), "out_max");
    model.config_echo = r.expect("config");
    long long tmp = 0;
    if (!try_parse_int(r.expect("epochs_run"), tmp)) throw MlError("bad epochs_run");
    model.epochs_run = static_cast<int>(tmp);
    model.final_loss = parse_double(r.expect("final_loss"), "final_loss");

    const std::size_t m = model.target_names.size();
    if (model.family == Family::lr || model.family == Family::mlp) {
        model.activation = activation_from_name(r.expect("activation"));
        auto sizes = parse_doubles(r.expect("layers"), "layers");
        for (double s : sizes) model.layer_sizes.push_back(static_cast<int>(s));
        for (std::size_t l = 0; l + 1 < model.layer_sizes.size(); ++l) {
            std::string wl = r.expect("W");
            std::size_t sp = wl.find(' ');
            model.weights.push_back(parse_doubles(wl.substr(sp + 1), "W"));
            std::string bl = r.expect("B");
            sp = bl.find(' ');
            model.biases.push_back(parse_doubles(bl.substr(sp + 1), "B"));
            std::size_t expect_w = static_cast<std::size_t>(model.layer_sizes[l]) *
                                   model.layer_sizes[l + 1];
            if (model.weights.back().size() != expect_w ||
                model.biases.back().size() != static_cast<std::size_t>(model.layer_sizes[l + 1]))
                throw MlError("model layer size mismatch");
        }
    } else if (model.family == Family::rf) {
        model.forests.resize(m);
        for (std::size_t t = 0; t < m; ++t) {
            std::istringstream hdr(r.expect("forest"));
            std::size_t idx = 0, ntrees = 0;
            hdr >> idx >> ntrees;
            if (idx != t) throw MlError("model forests out of order");
            for (std::size_t k = 0; k < ntrees; ++k) {
                std::size_t nnodes = 0;
                std::istringstream th(r.expect("tree"));
                th >> nnodes;
                Tree tree;
                for (std::size_t nd = 0; nd < nnodes; ++nd) {
                    std::istringstream ns(r.expect("node"));
                    TreeNode node;
                    std::string thr, val;
                    ns >> node.feature >> thr >> node.left >> node.right >> val;
                    if (!try_parse_double(thr, node.threshold) ||
                        !try_parse_double(val, node.value))
                        throw MlError("bad tree node");
                    tree.nodes.push_back(node);
                }
                model.forests[t].push_back(std::move(tree));
            }
        }
    } else {
        for (std::size_t t = 0; t < m; ++t) {
            std::istringstream hdr(r.expect("svr"));
            std::size_t idx = 0, nsv = 0;
            std::string kernel, gamma, bias;
            hdr >> idx >> kernel >> gamma >> bias >> nsv;
            if (idx != t) throw MlError("model machines out of order");
            SvrMachine mach;
            mach.kernel = kernel == "linear" ? Kernel::linear : Kernel::rbf;
            if (!try_parse_double(gamma, mach.gamma) || !try_parse_double(bias, mach.bias))
                throw MlError("bad svr header");
            for (std::size_t s = 0; s < nsv; ++s) {
                auto vals = parse_doubles(r.expect("sv"), "sv");
                if (vals.size() != 1 + model.input_names.size())
                    throw MlError("bad support vector width");
                mach.coef.push_back(vals[0]);
                mach.support.emplace_back(vals.begin() + 1, vals.end());
            }
            model.machines.push_back(std::move(mach));
        }
    }
    return model;
}

TrainedModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MlError("cannot open '" + path + "' for reading");
    return load_model(in);
}

} // namespace fgml::ml

#include "lingan/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace lingan::config {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& value, const std::string& key) {
    T out{};
    const char* begin = value.data();
    const char* end = value.data() + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw ConfigError("config: key '" + key + "' has malformed value '" + value + "'");
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

} // namespace

std::vector<Index> parse_index_list(const std::string& text) {
    const std::string body = trim(text);
    if (body.empty()) throw ConfigError("config: empty integer list");
    std::vector<Index> out;
    if (body.find(':') != std::string::npos) {
        const std::vector<std::string> parts = split(body, ':');
        if (parts.size() != 3)
            throw ConfigError("config: range must have the form start:step:end, got '" + body +
                              "'");
        const Index start = parse_number<Index>(trim(parts[0]), "range start");
        const Index step = parse_number<Index>(trim(parts[1]), "range step");
        const Index end = parse_number<Index>(trim(parts[2]), "range end");
        if (step < 1) throw ConfigError("config: range step must be >= 1");
        if (start > end) throw ConfigError("config: empty range '" + body + "'");
        for (Index v = start; v <= end; v += step) out.push_back(v);
        return out;
    }
    for (const std::string& part : split(body, ',')) {
        const std::string item = trim(part);
        if (item.empty()) throw ConfigError("config: empty element in list '" + body + "'");
        out.push_back(parse_number<Index>(item, "list element"));
    }
    return out;
}

experiments::ExperimentConfig parse_stream(std::istream& in, const std::string& source) {
    experiments::ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: " + source + ":" + std::to_string(line_no) +
                              ": expected key = value, got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config: " + source + ":" + std::to_string(line_no) +
                              ": missing key");
        if (value.empty())
            throw ConfigError("config: " + source + ":" + std::to_string(line_no) +
                              ": key '" + key + "' has no value");
        if (!seen.insert(key).second)
            throw ConfigError("config: " + source + ":" + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");

        try {
            if (key == "d") {
                cfg.d = parse_number<Index>(value, key);
            } else if (key == "m") {
                cfg.m = parse_number<Index>(value, key);
            } else if (key == "n") {
                cfg.n = parse_number<Index>(value, key);
            } else if (key == "sigma") {
                cfg.sigma = parse_number<double>(value, key);
            } else if (key == "gamma_kind") {
                if (value == "hadamard")
                    cfg.gamma_kind = datagen::GammaKind::hadamard;
                else if (value == "random_orthonormal")
                    cfg.gamma_kind = datagen::GammaKind::random_orthonormal;
                else
                    throw ConfigError("config: gamma_kind must be 'hadamard' or "
                                      "'random_orthonormal', got '" + value + "'");
            } else if (key == "trials") {
                cfg.trials = parse_number<long>(value, key);
            } else if (key == "base_seed") {
                cfg.base_seed = parse_number<std::uint64_t>(value, key);
            } else if (key == "k_grid") {
                cfg.k_grid = parse_index_list(value);
            } else if (key == "n_ps_list") {
                cfg.n_ps_list = parse_index_list(value);
            } else if (key == "variant") {
                cfg.variant = experiments::sweep_variant_from_name(value);
            } else if (key == "alpha") {
                cfg.alpha = parse_number<double>(value, key);
            } else if (key == "test_convention") {
                if (value == "w2")
                    cfg.test_convention = experiments::TestConvention::w2;
                else if (value == "w2_squared")
                    cfg.test_convention = experiments::TestConvention::w2_squared;
                else
                    throw ConfigError("config: test_convention must be 'w2' or 'w2_squared', "
                                      "got '" + value + "'");
            } else if (key == "test_target") {
                if (value == "clean")
                    cfg.test_target = experiments::TestTarget::clean;
                else if (value == "noisy")
                    cfg.test_target = experiments::TestTarget::noisy;
                else
                    throw ConfigError("config: test_target must be 'clean' or 'noisy', got '" +
                                      value + "'");
            } else if (key == "max_iters") {
                cfg.gd.max_iters = parse_number<int>(value, key);
            } else if (key == "init_std") {
                cfg.gd.init_std = parse_number<double>(value, key);
            } else if (key == "step_init") {
                cfg.gd.step_init = parse_number<double>(value, key);
            } else if (key == "grad_stop") {
                cfg.gd.grad_stop = parse_number<double>(value, key);
            } else if (key == "move_tol") {
                cfg.gd.move_tol = parse_number<double>(value, key);
            } else if (key == "stall_limit") {
                cfg.gd.stall_limit = parse_number<int>(value, key);
            } else if (key == "workers") {
                cfg.workers = parse_number<int>(value, key);
            } else {
                throw ConfigError("config: unknown key '" + key + "'");
            }
        } catch (const InvalidInput& e) {
            throw ConfigError("config: " + source + ":" + std::to_string(line_no) + ": " +
                              e.what());
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()) + " (" + source + ":" +
                              std::to_string(line_no) + ")");
        }
    }
    return cfg;
}

experiments::ExperimentConfig parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    return parse_stream(in, path);
}

void apply_env_overrides(experiments::ExperimentConfig& cfg) {
    if (const char* env = std::getenv("WORKERS")) {
        cfg.workers = parse_number<int>(std::string(env), "WORKERS");
        if (cfg.workers < 0) throw ConfigError("config: WORKERS must be >= 0");
    }
}

std::string render(const experiments::ExperimentConfig& cfg) {
    auto list = [](const std::vector<Index>& v) {
        std::ostringstream os;
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
        return os.str();
    };
    std::ostringstream os;
    os << "d = " << cfg.d << "\n"
       << "m = " << cfg.m << "\n"
       << "n = " << cfg.n << "\n"
       << "sigma = " << cfg.sigma << "\n"
       << "gamma_kind = "
       << (cfg.gamma_kind == datagen::GammaKind::hadamard ? "hadamard" : "random_orthonormal")
       << "\n"
       << "trials = " << cfg.trials << "\n"
       << "base_seed = " << cfg.base_seed << "\n"
       << "k_grid = " << list(cfg.resolved_k_grid()) << "\n"
       << "n_ps_list = " << list(cfg.resolved_n_ps_list()) << "\n"
       << "variant = " << experiments::sweep_variant_name(cfg.variant) << "\n"
       << "alpha = " << cfg.alpha << "\n"
       << "test_convention = " << experiments::convention_name(cfg.test_convention) << "\n"
       << "test_target = " << experiments::target_name(cfg.test_target) << "\n"
       << "max_iters = " << cfg.gd.max_iters << "\n"
       << "init_std = " << cfg.gd.init_std << "\n"
       << "step_init = " << cfg.gd.step_init << "\n"
       << "grad_stop = " << cfg.gd.grad_stop << "\n"
       << "move_tol = " << cfg.gd.move_tol << "\n"
       << "stall_limit = " << cfg.gd.stall_limit << "\n"
       << "workers = " << cfg.workers << "\n";
    return os.str();
}

} // namespace lingan::config

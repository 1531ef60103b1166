#include "simquant/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

#include "simquant/errors.hpp"

namespace simquant {

namespace {

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != v.size()) throw Error(ErrorKind::ParseError, "field '" + key + "': not a number: '" + v + "'");
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw Error(ErrorKind::ParseError, "field '" + key + "': not an integer: '" + v + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "1" || v == "true" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "no") return false;
    throw Error(ErrorKind::ParseError, "field '" + key + "': not a boolean: '" + v + "'");
}

}  // namespace

double RunConfig::tolerance(const std::string& name, double fallback) const {
    std::size_t best = 0;
    double tol = fallback;
    for (const auto& [prefix, value] : tolerances)
        if (name.compare(0, prefix.size(), prefix) == 0 && prefix.size() >= best) {
            best = prefix.size();
            tol = value;
        }
    return tol;
}

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "weight") cfg.weight = value;
    else if (key == "alpha") cfg.alpha = to_double(key, value);
    else if (key == "observable") cfg.observable = value;
    else if (key == "out") cfg.out = value;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
    else if (key == "suite") cfg.suite = value;
    else if (key == "legacy_6_28") cfg.legacy_6_28 = to_bool(key, value);
    else if (key == "grid.n_r") cfg.grid_n_r = static_cast<int>(to_int(key, value));
    else if (key == "grid.n_theta") cfg.grid_n_theta = static_cast<int>(to_int(key, value));
    else if (key == "grid.r_min") cfg.grid_r_min = to_double(key, value);
    else if (key == "grid.r_max") cfg.grid_r_max = to_double(key, value);
    else if (key == "samples.nq_r") cfg.nq_r = static_cast<int>(to_int(key, value));
    else if (key == "samples.nq_t") cfg.nq_t = static_cast<int>(to_int(key, value));
    else if (key == "samples.np_r") cfg.np_r = static_cast<int>(to_int(key, value));
    else if (key == "samples.np_t") cfg.np_t = static_cast<int>(to_int(key, value));
    else if (key == "samples.q_min") cfg.q_min = to_double(key, value);
    else if (key == "samples.q_max") cfg.q_max = to_double(key, value);
    else if (key == "samples.p_max") cfg.p_max = to_double(key, value);
    else if (key.rfind("tolerance.", 0) == 0 && key.size() > 10) cfg.tolerances[key.substr(10)] = to_double(key, value);
    else throw Error(ErrorKind::ParseError, "unknown field '" + key + "'");
}

void validate_config(const RunConfig& cfg) {
    std::vector<std::string> bad;
    if (cfg.weight != "cs" && cfg.weight != "inversion") bad.push_back("weight must be cs or inversion");
    if (cfg.weight == "cs" && !(cfg.alpha > 2.0)) bad.push_back("alpha > 2 required for the cs weight");
    if (!(cfg.alpha > 1.0)) bad.push_back("alpha > 1 required");
    if (cfg.grid_n_r < 16 || cfg.grid_n_theta < 8) bad.push_back("grid needs n_r >= 16 and n_theta >= 8");
    if (!(cfg.grid_r_min > 0.0) || !(cfg.grid_r_max > cfg.grid_r_min)) bad.push_back("grid needs 0 < r_min < r_max");
    if (cfg.nq_r < 1 || cfg.nq_t < 1 || cfg.np_r < 1 || cfg.np_t < 1) bad.push_back("sample counts must be positive");
    if (!(cfg.q_min > 0.0) || !(cfg.q_max > cfg.q_min) || !(cfg.p_max > 0.0))
        bad.push_back("samples need 0 < q_min < q_max and p_max > 0");
    for (const auto& [name, tol] : cfg.tolerances)
        if (!(tol > 0.0)) bad.push_back("tolerance." + name + " must be positive");
    if (!bad.empty()) {
        std::string msg;
        for (const auto& b : bad) msg += (msg.empty() ? "" : "; ") + b;
        throw Error(ErrorKind::ValidationError, msg);
    }
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream words(line);
        std::string word;
        while (words >> word) {
            const auto eq = word.find('=');
            if (eq == std::string::npos || eq == 0)
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": expected key=value, got '" +
                                                       word + "'");
            try {
                set_config_value(cfg, word.substr(0, eq), word.substr(eq + 1));
            } catch (const Error& e) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": " +
                                                       std::string(e.what()).substr(std::string("ParseError: ").size()));
            }
        }
    }
    validate_config(cfg);
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(ErrorKind::ParseError, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace simquant

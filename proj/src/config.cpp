#include "nlc/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nlc/errors.hpp"
#include "nlc/series_io.hpp"

namespace nlc {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Value {
    std::string text;
    int line = 0;

    long as_integer() const {
        long v = 0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
            throw ConfigError(line, "expected an integer, got '" + text + "'");
        return v;
    }

    double as_real() const {
        double v = 0.0;
        auto res = std::from_chars(text.data(), text.data() + text.size(), v);
        if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
            throw ConfigError(line, "expected a real number, got '" + text + "'");
        return v;
    }

    bool as_bool() const {
        if (text == "true") return true;
        if (text == "false") return false;
        throw ConfigError(line, "expected true or false, got '" + text + "'");
    }

    std::vector<std::string> split_top_level(char open, char close) const {
        if (text.size() < 2 || text.front() != open || text.back() != close)
            throw ConfigError(line, std::string("expected ") + open + "..." + close +
                                        ", got '" + text + "'");
        std::vector<std::string> parts;
        std::string cur;
        int depth = 0;
        for (std::size_t i = 1; i + 1 < text.size(); ++i) {
            const char c = text[i];
            if (c == '(') ++depth;
            if (c == ')') --depth;
            if (c == ',' && depth == 0) {
                parts.push_back(trim(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        const std::string last = trim(cur);
        if (!last.empty() || !parts.empty()) parts.push_back(last);
        for (const auto& p : parts)
            if (p.empty()) throw ConfigError(line, "empty element in '" + text + "'");
        return parts;
    }

    Eigen::Vector3d as_vec3() const {
        const auto parts = split_top_level('(', ')');
        if (parts.size() != 3)
            throw ConfigError(line, "expected a 3-vector (a, b, c), got '" + text + "'");
        Eigen::Vector3d v;
        for (int i = 0; i < 3; ++i) v[i] = Value{parts[i], line}.as_real();
        return v;
    }

    std::vector<double> as_real_list() const {
        std::vector<double> out;
        for (const auto& p : split_top_level('{', '}')) out.push_back(Value{p, line}.as_real());
        return out;
    }

    std::vector<Eigen::Vector3d> as_vec3_list() const {
        std::vector<Eigen::Vector3d> out;
        for (const auto& p : split_top_level('{', '}')) out.push_back(Value{p, line}.as_vec3());
        return out;
    }
};

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::string section;
    bool have_n = false, have_l = false, have_dt = false, have_tend = false;
    int widths_line = 0, centers_line = 0, fit_line = 0;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(lineno, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "grid" && section != "model" && section != "init" &&
                section != "diagnostics" && section != "output")
                throw ConfigError(lineno, "unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const Value val{trim(line.substr(eq + 1)), lineno};
        if (key.empty()) throw ConfigError(lineno, "missing key before '='");
        if (section.empty()) throw ConfigError(lineno, "key '" + key + "' outside any section");
        if (!seen.insert(section + "." + key).second)
            throw ConfigError(lineno, "duplicate key '" + key + "' in [" + section + "]");

        if (section == "grid") {
            if (key == "N") {
                const long n = val.as_integer();
                if (n < 8 || n % 2 != 0)
                    throw ConfigError(lineno, "N must be even >= 8, got " + val.text);
                cfg.n = static_cast<int>(n);
                have_n = true;
            } else if (key == "L") {
                cfg.box_length = val.as_real();
                if (!(cfg.box_length > 0.0)) throw ConfigError(lineno, "L must be > 0");
                have_l = true;
            } else {
                throw ConfigError(lineno, "unknown key '" + key + "' in [grid]");
            }
        } else if (section == "model") {
            if (key == "mu") {
                cfg.model.mu = val.as_real();
                if (!(cfg.model.mu > 0.0)) throw ConfigError(lineno, "mu must be > 0");
            } else if (key == "w0") {
                cfg.model.w0 = val.as_vec3();
                if (std::abs(cfg.model.w0.norm() - 1.0) > 1e-14)
                    throw ConfigError(lineno, "w0 must be a unit vector to 1e-14");
            } else if (key == "dt") {
                cfg.model.dt = val.as_real();
                if (!(cfg.model.dt > 0.0)) throw ConfigError(lineno, "dt must be > 0");
                have_dt = true;
            } else if (key == "t_end") {
                cfg.model.t_end = val.as_real();
                if (cfg.model.t_end < 0.0) throw ConfigError(lineno, "t_end must be >= 0");
                have_tend = true;
            } else if (key == "dealias") {
                cfg.model.dealias_on = val.as_bool();
            } else if (key == "renormalize_director") {
                if (val.text == "off")
                    cfg.model.renormalize_director = RenormalizePolicy::Off;
                else if (val.text == "every_step")
                    cfg.model.renormalize_director = RenormalizePolicy::EveryStep;
                else
                    throw ConfigError(lineno,
                                      "renormalize_director must be off or every_step, got '" +
                                          val.text + "'");
            } else if (key == "constraint_abort_tol") {
                cfg.model.constraint_abort_tol = val.as_real();
                if (!(cfg.model.constraint_abort_tol > 0.0))
                    throw ConfigError(lineno, "constraint_abort_tol must be > 0");
            } else {
                throw ConfigError(lineno, "unknown key '" + key + "' in [model]");
            }
        } else if (section == "init") {
            if (key == "seed") {
                cfg.init.seed = static_cast<std::uint64_t>(val.as_integer());
            } else if (key == "centers") {
                cfg.init.centers = val.as_vec3_list();
                centers_line = lineno;
            } else if (key == "widths") {
                cfg.init.widths = val.as_real_list();
                widths_line = lineno;
            } else if (key == "velocity_amplitude") {
                cfg.init.velocity_amplitude = val.as_real();
                if (cfg.init.velocity_amplitude < 0.0)
                    throw ConfigError(lineno, "velocity_amplitude must be >= 0");
            } else if (key == "director_amplitude") {
                cfg.init.director_amplitude = val.as_real();
                if (cfg.init.director_amplitude < 0.0)
                    throw ConfigError(lineno, "director_amplitude must be >= 0");
            } else if (key == "delta0") {
                cfg.init.delta0 = val.as_real();
                if (!(cfg.init.delta0 > 0.0)) throw ConfigError(lineno, "delta0 must be > 0");
            } else {
                throw ConfigError(lineno, "unknown key '" + key + "' in [init]");
            }
        } else if (section == "diagnostics") {
            if (key == "k_max") {
                const long k = val.as_integer();
                if (k < 1) throw ConfigError(lineno, "k_max must be >= 1");
                cfg.diag.k_max = static_cast<int>(k);
            } else if (key == "p_list") {
                cfg.diag.p_list = val.as_real_list();
                for (double p : cfg.diag.p_list)
                    if (p < 1.0) throw ConfigError(lineno, "p_list entries must be >= 1");
            } else if (key == "cadence") {
                cfg.diag.cadence = val.as_real();
                if (!(cfg.diag.cadence > 0.0)) throw ConfigError(lineno, "cadence must be > 0");
            } else if (key == "fit_t0") {
                cfg.diag.fit_t0 = val.as_real();
                fit_line = lineno;
            } else if (key == "fit_t1") {
                cfg.diag.fit_t1 = val.as_real();
                fit_line = lineno;
            } else {
                throw ConfigError(lineno, "unknown key '" + key + "' in [diagnostics]");
            }
        } else if (section == "output") {
            if (key == "directory") {
                if (val.text.empty()) throw ConfigError(lineno, "directory must be nonempty");
                cfg.output_dir = val.text;
            } else {
                throw ConfigError(lineno, "unknown key '" + key + "' in [output]");
            }
        }
    }

    if (!have_n) throw ConfigError(0, "missing required key N in [grid]");
    if (!have_l) throw ConfigError(0, "missing required key L in [grid]");
    if (!have_dt) throw ConfigError(0, "missing required key dt in [model]");
    if (!have_tend) throw ConfigError(0, "missing required key t_end in [model]");

    if (cfg.init.centers.size() != cfg.init.widths.size())
        throw ConfigError(std::max(widths_line, centers_line),
                          "centers and widths must have equal lengths");
    for (double w : cfg.init.widths)
        if (!(w > 0.0) || w > cfg.box_length / 8.0)
            throw ConfigError(widths_line, "widths must satisfy 0 < w <= L/8");
    if (!(cfg.diag.fit_t1 > cfg.diag.fit_t0))
        throw ConfigError(fit_line, "fit window must satisfy fit_t1 > fit_t0");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(0, "cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& c) {
    std::ostringstream out;
    auto vec3 = [](const Eigen::Vector3d& v) {
        return "(" + format_double(v.x()) + ", " + format_double(v.y()) + ", " +
               format_double(v.z()) + ")";
    };
    out << "[grid]\n";
    out << "N = " << c.n << "\n";
    out << "L = " << format_double(c.box_length) << "\n";
    out << "\n[model]\n";
    out << "mu = " << format_double(c.model.mu) << "\n";
    out << "w0 = " << vec3(c.model.w0) << "\n";
    out << "dt = " << format_double(c.model.dt) << "\n";
    out << "t_end = " << format_double(c.model.t_end) << "\n";
    out << "dealias = " << (c.model.dealias_on ? "true" : "false") << "\n";
    out << "renormalize_director = "
        << (c.model.renormalize_director == RenormalizePolicy::Off ? "off" : "every_step")
        << "\n";
    out << "constraint_abort_tol = " << format_double(c.model.constraint_abort_tol) << "\n";
    out << "\n[init]\n";
    out << "seed = " << c.init.seed << "\n";
    out << "centers = {";
    for (std::size_t i = 0; i < c.init.centers.size(); ++i)
        out << (i ? ", " : "") << vec3(c.init.centers[i]);
    out << "}\n";
    out << "widths = {";
    for (std::size_t i = 0; i < c.init.widths.size(); ++i)
        out << (i ? ", " : "") << format_double(c.init.widths[i]);
    out << "}\n";
    out << "velocity_amplitude = " << format_double(c.init.velocity_amplitude) << "\n";
    out << "director_amplitude = " << format_double(c.init.director_amplitude) << "\n";
    out << "delta0 = " << format_double(c.init.delta0) << "\n";
    out << "\n[diagnostics]\n";
    out << "k_max = " << c.diag.k_max << "\n";
    out << "p_list = {";
    for (std::size_t i = 0; i < c.diag.p_list.size(); ++i)
        out << (i ? ", " : "") << format_double(c.diag.p_list[i]);
    out << "}\n";
    out << "cadence = " << format_double(c.diag.cadence) << "\n";
    out << "fit_t0 = " << format_double(c.diag.fit_t0) << "\n";
    out << "fit_t1 = " << format_double(c.diag.fit_t1) << "\n";
    out << "\n[output]\n";
    out << "directory = " << c.output_dir << "\n";
    return out.str();
}

} // namespace nlc

#include "nlc/series_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "nlc/errors.hpp"

namespace nlc {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw DataError("not a number: '" + s + "'");
    return v;
}

void NormSeries::append(SeriesRow row) {
    if (!rows.empty()) {
        const SeriesRow& prev = rows.back();
        if (!(row.t > prev.t))
            throw std::invalid_argument("NormSeries: record times must be strictly increasing");
        const double g0 = prev.n_norms[1] * prev.n_norms[1];
        const double g1 = row.n_norms[1] * row.n_norms[1];
        row.cum_dissipation = prev.cum_dissipation + 0.5 * (row.t - prev.t) * (g0 + g1);
    } else {
        row.cum_dissipation = 0.0;
    }
    rows.push_back(std::move(row));
}

std::vector<std::string> NormSeries::column_names() const {
    std::vector<std::string> names;
    names.push_back("t");
    for (int k = 0; k <= k_max; ++k) names.push_back("norm_u_k" + std::to_string(k));
    for (int m = 0; m <= k_max + 1; ++m) names.push_back("norm_n_m" + std::to_string(m));
    for (double p : p_list) names.push_back("lp_n_p" + format_double(p));
    for (int k = 0; k < k_max; ++k) names.push_back("norm_nt_k" + std::to_string(k));
    for (int k = 0; k < k_max; ++k) names.push_back("norm_ut_k" + std::to_string(k));
    for (int k = 0; k < k_max; ++k) names.push_back("norm_gradP_k" + std::to_string(k));
    names.push_back("cum_dissipation");
    return names;
}

std::size_t NormSeries::column_count() const {
    return 1 + (k_max + 1) + (k_max + 2) + p_list.size() + 3 * static_cast<std::size_t>(k_max) + 1;
}

std::vector<double> NormSeries::column(const std::string& name) const {
    const auto names = column_names();
    std::size_t idx = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) idx = i;
    if (idx == names.size())
        throw std::invalid_argument("NormSeries: unknown column '" + name + "'");

    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        std::vector<double> flat;
        flat.reserve(column_count());
        flat.push_back(r.t);
        flat.insert(flat.end(), r.u_norms.begin(), r.u_norms.end());
        flat.insert(flat.end(), r.n_norms.begin(), r.n_norms.end());
        flat.insert(flat.end(), r.n_lp.begin(), r.n_lp.end());
        flat.insert(flat.end(), r.nt_norms.begin(), r.nt_norms.end());
        flat.insert(flat.end(), r.ut_norms.begin(), r.ut_norms.end());
        flat.insert(flat.end(), r.gradp_norms.begin(), r.gradp_norms.end());
        flat.push_back(r.cum_dissipation);
        out.push_back(flat.at(idx));
    }
    return out;
}

void write_series(const NormSeries& series, const std::string& path) {
    if (series.rows.empty()) throw std::invalid_argument("write_series: empty series");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw DataError("write_series: cannot open " + path);

    const auto names = series.column_names();
    for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
    out << "\n";
    for (const auto& r : series.rows) {
        std::string line;
        auto add = [&](double v) {
            if (!line.empty()) line += ",";
            line += format_double(v);
        };
        add(r.t);
        for (double v : r.u_norms) add(v);
        for (double v : r.n_norms) add(v);
        for (double v : r.n_lp) add(v);
        for (double v : r.nt_norms) add(v);
        for (double v : r.ut_norms) add(v);
        for (double v : r.gradp_norms) add(v);
        add(r.cum_dissipation);
        out << line << "\n";
    }
    if (!out) throw DataError("write_series: write failed for " + path);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

} // namespace

NormSeries read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("read_series: cannot open " + path);
    std::string header;
    if (!std::getline(in, header)) throw DataError("read_series: " + path + " is empty");
    const auto names = split_csv(header);

    NormSeries s;
    int n_u = 0, n_n = 0, n_nt = 0, n_ut = 0, n_gp = 0;
    s.p_list.clear();
    for (const auto& name : names) {
        if (name.rfind("norm_u_k", 0) == 0) ++n_u;
        else if (name.rfind("norm_n_m", 0) == 0) ++n_n;
        else if (name.rfind("lp_n_p", 0) == 0) s.p_list.push_back(parse_double(name.substr(6)));
        else if (name.rfind("norm_nt_k", 0) == 0) ++n_nt;
        else if (name.rfind("norm_ut_k", 0) == 0) ++n_ut;
        else if (name.rfind("norm_gradP_k", 0) == 0) ++n_gp;
        else if (name != "t" && name != "cum_dissipation")
            throw DataError("read_series: " + path + ": unknown column '" + name + "'");
    }
    s.k_max = n_u - 1;
    if (n_u < 2 || n_n != n_u + 1 || n_nt != n_u - 1 || n_ut != n_u - 1 || n_gp != n_u - 1 ||
        names != s.column_names())
        throw DataError("read_series: " + path + ": header does not match the series schema");

    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto parts = split_csv(line);
        if (parts.size() != s.column_count())
            throw DataError("read_series: " + path + ":" + std::to_string(lineno) +
                            ": expected " + std::to_string(s.column_count()) + " fields, got " +
                            std::to_string(parts.size()));
        SeriesRow r;
        std::size_t i = 0;
        auto take = [&]() { return parse_double(parts[i++]); };
        r.t = take();
        for (int k = 0; k <= s.k_max; ++k) r.u_norms.push_back(take());
        for (int m = 0; m <= s.k_max + 1; ++m) r.n_norms.push_back(take());
        for (std::size_t j = 0; j < s.p_list.size(); ++j) r.n_lp.push_back(take());
        for (int k = 0; k < s.k_max; ++k) r.nt_norms.push_back(take());
        for (int k = 0; k < s.k_max; ++k) r.ut_norms.push_back(take());
        for (int k = 0; k < s.k_max; ++k) r.gradp_norms.push_back(take());
        r.cum_dissipation = take();
        s.rows.push_back(std::move(r));
    }
    return s;
}

} // namespace nlc

#include "martdiag/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "martdiag/errors.hpp"

namespace martdiag {

using nlohmann::json;

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open for reading: " + path);
    return in;
}

void write_provenance(std::ofstream& out, const Provenance& prov) {
    for (const auto& [k, v] : prov) out << "# " << k << "=" << v << "\n";
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, const std::string& path, long row) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(path + ": bad numeric field '" + s + "' at row " +
                        std::to_string(row));
    }
}

long parse_long(const std::string& s, const std::string& path, long row) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(path + ": bad integer field '" + s + "' at row " +
                        std::to_string(row));
    }
}

// Reads all data lines, checking the header; returns (row number, fields).
std::vector<std::pair<long, std::vector<std::string>>> read_csv_rows(
    const std::string& path, const std::string& expected_header) {
    auto in = open_in(path);
    std::string line;
    long row = 0;
    bool header_seen = false;
    std::vector<std::pair<long, std::vector<std::string>>> rows;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            std::string got = line;
            if (!got.empty() && got.back() == '\r') got.pop_back();
            if (got != expected_header)
                throw DataError(path + ": expected header '" + expected_header +
                                "' at row " + std::to_string(row) + ", got '" + got + "'");
            header_seen = true;
            continue;
        }
        rows.emplace_back(row, split_csv(line));
    }
    if (!header_seen) throw DataError(path + ": empty file (no header)");
    return rows;
}

json basis_to_json(const OrthoPolyBasis& b) {
    return json{{"degree", b.degree}, {"alpha", b.alpha}, {"beta", b.beta},
                {"norm", b.norm}};
}

OrthoPolyBasis basis_from_json(const json& j) {
    OrthoPolyBasis b;
    b.degree = j.at("degree").get<int>();
    b.alpha = j.at("alpha").get<std::vector<double>>();
    b.beta = j.at("beta").get<std::vector<double>>();
    b.norm = j.at("norm").get<std::vector<double>>();
    return b;
}

json prov_to_json(const Provenance& prov) {
    json j = json::object();
    for (const auto& [k, v] : prov) j[k] = v;
    return j;
}

void dump_json(const std::string& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << "\n";
}

json load_json(const std::string& path) {
    auto in = open_in(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError(path + ": " + e.what());
    }
}

}  // namespace

void write_series_csv(const std::string& path, const std::vector<SeriesPath>& series,
                      const Provenance& prov) {
    auto out = open_out(path);
    write_provenance(out, prov);
    out << "series_id,t,y\n";
    for (std::size_t j = 0; j < series.size(); ++j)
        for (std::size_t t = 0; t < series[j].values.size(); ++t)
            out << j << "," << (t + 1) << "," << fmt_double(series[j].values[t]) << "\n";
}

void write_prob_csv(const std::string& path, const std::vector<ProbPath>& paths,
                    const Provenance& prov) {
    auto out = open_out(path);
    write_provenance(out, prov);
    out << "series_id,t,p,d,S,V\n";
    for (std::size_t j = 0; j < paths.size(); ++j) {
        VolatilityPath vol = quadratic_variation(paths[j]);
        for (std::size_t t = 0; t < paths[j].probs.size(); ++t) {
            double d = t == 0 ? 0.0 : paths[j].probs[t] - paths[j].probs[t - 1];
            out << j << "," << t << "," << fmt_double(paths[j].probs[t]) << ","
                << fmt_double(d) << "," << fmt_double(vol.s_values[t]) << ","
                << fmt_double(vol.v_values[t]) << "\n";
        }
    }
}

std::vector<ProbPath> read_prob_csv(const std::string& path) {
    auto rows = read_csv_rows(path, "series_id,t,p,d,S,V");
    if (rows.empty()) throw DataError(path + ": no data rows");
    std::map<long, std::vector<std::pair<long, double>>> by_series;
    for (const auto& [row, f] : rows) {
        if (f.size() != 6)
            throw DataError(path + ": expected 6 fields at row " + std::to_string(row));
        long id = parse_long(f[0], path, row);
        long t = parse_long(f[1], path, row);
        by_series[id].emplace_back(t, parse_double(f[2], path, row));
    }
    std::vector<ProbPath> out;
    out.reserve(by_series.size());
    for (auto& [id, pts] : by_series) {
        std::sort(pts.begin(), pts.end());
        ProbPath p;
        p.probs.reserve(pts.size());
        for (std::size_t t = 0; t < pts.size(); ++t) {
            if (pts[t].first != static_cast<long>(t))
                throw DataError(path + ": series " + std::to_string(id) +
                                " has a gap at t=" + std::to_string(t));
            p.probs.push_back(pts[t].second);
        }
        p.pi = p.probs.front();
        out.push_back(std::move(p));
    }
    return out;
}

void write_scatter_csv(const std::string& path, const ScatterData& sc,
                       const Provenance& prov) {
    auto out = open_out(path);
    write_provenance(out, prov);
    if (sc.line_defined) {
        out << "# fit_slope=" << fmt_double(sc.slope)
            << "\n# fit_intercept=" << fmt_double(sc.intercept) << "\n";
    } else {
        out << "# fit=degenerate\n";
    }
    out << "lag_s,lag_t,x,y\n";
    for (std::size_t j = 0; j < sc.x.size(); ++j)
        out << sc.lag_s << "," << sc.lag_t << "," << fmt_double(sc.x[j]) << ","
            << fmt_double(sc.y[j]) << "\n";
}

void write_boxplot_csv(const std::string& path, const PrequentialReport& rep,
                       const Provenance& prov) {
    auto out = open_out(path);
    write_provenance(out, prov);
    out << "series_id,stat,value\n";
    for (std::size_t j = 0; j < rep.r2_tilde.size(); ++j) {
        if (!std::isnan(rep.r2_tilde[j]))
            out << j << ",prequential_r2," << fmt_double(rep.r2_tilde[j]) << "\n";
        if (!std::isnan(rep.ols_r2[j]))
            out << j << ",ols_r2," << fmt_double(rep.ols_r2[j]) << "\n";
    }
}

void write_games_csv(const std::string& path, const std::vector<GamePath>& games,
                     const Provenance& prov) {
    auto out = open_out(path);
    write_provenance(out, prov);
    out << "game_id,season,i,t_min,score_diff,home_win\n";
    for (const auto& g : games)
        for (std::size_t i = 0; i < g.score_diff.size(); ++i)
            out << g.game_id << "," << g.season << "," << i << ","
                << fmt_double(g.times_min[i]) << "," << g.score_diff[i] << ","
                << g.home_win << "\n";
}

std::vector<GamePath> read_games_csv(const std::string& path) {
    auto rows = read_csv_rows(path, "game_id,season,i,t_min,score_diff,home_win");
    if (rows.empty()) throw DataError(path + ": no data rows");
    std::vector<GamePath> out;
    std::map<std::string, std::size_t> index;
    for (const auto& [row, f] : rows) {
        if (f.size() != 6)
            throw DataError(path + ": expected 6 fields at row " + std::to_string(row));
        const std::string& id = f[0];
        auto [it, inserted] = index.try_emplace(id, out.size());
        if (inserted) {
            out.emplace_back();
            out.back().game_id = id;
            out.back().season = f[1];
        }
        GamePath& g = out[it->second];
        long i = parse_long(f[2], path, row);
        if (i != static_cast<long>(g.score_diff.size()))
            throw DataError(path + ": game " + id + " rows out of order at row " +
                            std::to_string(row));
        g.times_min.push_back(parse_double(f[3], path, row));
        g.score_diff.push_back(static_cast<int>(parse_long(f[4], path, row)));
        long win = parse_long(f[5], path, row);
        if (win != 0 && win != 1)
            throw DataError(path + ": home_win must be 0/1 at row " + std::to_string(row));
        if (!g.times_min.empty() && g.times_min.size() > 1 && g.home_win != win)
            throw DataError(path + ": inconsistent label for game " + id + " at row " +
                            std::to_string(row));
        g.home_win = static_cast<int>(win);
    }
    return out;
}

void write_calibration_json(const std::string& path, const CalibrationReport& rep,
                            const Provenance& prov) {
    json j{{"lag_s", rep.lag_s},
           {"lag_t", rep.lag_t},
           {"slope", rep.slope},
           {"intercept", rep.intercept},
           {"slope_se", rep.slope_se},
           {"intercept_se", rep.intercept_se},
           {"poly_coef", rep.poly_coef},
           {"poly_t", rep.poly_t},
           {"diff_lags", rep.diff_lags},
           {"diff_coef", rep.diff_coef},
           {"diff_se", rep.diff_se},
           {"diff_t", rep.diff_t},
           {"wald_stat", rep.wald_stat},
           {"wald_pvalue", rep.wald_pvalue},
           {"wald_df", rep.wald_df},
           {"config", prov_to_json(prov)}};
    dump_json(path, j);
}

void write_volatility_json(const std::string& path, const VolatilityTestReport& rep,
                           const Provenance& prov) {
    json j{{"mean_total", rep.mean_total},
           {"se", rep.se},
           {"z", rep.z},
           {"target", rep.target},
           {"mean_s_total", rep.mean_s_total},
           {"cross_check_flag", rep.cross_check_flag},
           {"config", prov_to_json(prov)}};
    dump_json(path, j);
}

void write_prequential_json(const std::string& path, const PrequentialReport& rep,
                            const Provenance& prov) {
    auto clean = [](const std::vector<double>& v) {
        json a = json::array();
        for (double x : v) a.push_back(std::isnan(x) ? json() : json(x));
        return a;
    };
    json j{{"lag", rep.lag},
           {"burn_in", rep.burn_in},
           {"fraction_negative", rep.fraction_negative},
           {"r2_tilde", clean(rep.r2_tilde)},
           {"ols_r2", clean(rep.ols_r2)},
           {"config", prov_to_json(prov)}};
    dump_json(path, j);
}

void write_filter_json(const std::string& path, const FilterModel& m,
                       const Provenance& prov) {
    json j{{"horizon", m.horizon},
           {"tol", m.tol},
           {"r_packed", m.r},
           {"col_means", m.col_means},
           {"retained", std::vector<int>(m.retained.begin(), m.retained.end())},
           {"config", prov_to_json(prov)}};
    dump_json(path, j);
}

FilterModel read_filter_json(const std::string& path) {
    json j = load_json(path);
    FilterModel m;
    try {
        m.horizon = j.at("horizon").get<int>();
        m.tol = j.at("tol").get<double>();
        m.r = j.at("r_packed").get<std::vector<double>>();
        m.col_means = j.at("col_means").get<std::vector<double>>();
        auto ret = j.at("retained").get<std::vector<int>>();
        m.retained.assign(ret.begin(), ret.end());
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    const std::size_t dim = m.horizon + 1;
    if (m.col_means.size() != dim || m.retained.size() != dim ||
        m.r.size() != dim * (dim + 1) / 2)
        throw DataError(path + ": inconsistent filter model shape");
    return m;
}

void write_model_simple_json(const std::string& path, const ModelSimple& m,
                             const Provenance& prov) {
    json j{{"alpha0", m.alpha0}, {"alpha1", m.alpha1}, {"se0", m.se0},
           {"se1", m.se1},       {"n_obs", m.n_obs},   {"caveat", m.caveat},
           {"config", prov_to_json(prov)}};
    dump_json(path, j);
}

ModelSimple read_model_simple_json(const std::string& path) {
    json j = load_json(path);
    ModelSimple m;
    try {
        m.alpha0 = j.at("alpha0").get<double>();
        m.alpha1 = j.at("alpha1").get<double>();
        m.se0 = j.at("se0").get<double>();
        m.se1 = j.at("se1").get<double>();
        m.n_obs = j.at("n_obs").get<long>();
        m.caveat = j.at("caveat").get<std::string>();
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return m;
}

void write_model_weighted_json(const std::string& path, const ModelWeighted& m,
                               const Provenance& prov) {
    json j{{"degree", m.degree},
           {"include_baseline", m.include_baseline},
           {"beta0", m.beta0},
           {"beta", m.beta},
           {"gamma0", m.gamma0},
           {"gamma", m.gamma},
           {"n_obs", m.n_obs},
           {"config", prov_to_json(prov)}};
    if (m.degree > 0) j["basis"] = basis_to_json(m.basis);
    dump_json(path, j);
}

ModelWeighted read_model_weighted_json(const std::string& path) {
    json j = load_json(path);
    ModelWeighted m;
    try {
        m.degree = j.at("degree").get<int>();
        m.include_baseline = j.at("include_baseline").get<bool>();
        m.beta0 = j.at("beta0").get<double>();
        m.beta = j.at("beta").get<std::vector<double>>();
        m.gamma0 = j.at("gamma0").get<double>();
        m.gamma = j.at("gamma").get<std::vector<double>>();
        m.n_obs = j.at("n_obs").get<long>();
        if (m.degree > 0) m.basis = basis_from_json(j.at("basis"));
    } catch (const json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return m;
}

}  // namespace martdiag

#include "qlat/harness.hpp"

#include "qlat/eisenstein.hpp"
#include "qlat/errors.hpp"
#include "qlat/green.hpp"

#include <cmath>
#include <sstream>

#include <omp.h>

namespace qlat {

namespace {

i64 to_i64(const std::string& s) { return std::stoll(s); }

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',' || c == ';') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

} // namespace

ExperimentConfig ExperimentConfig::from_map(
    const std::map<std::string, std::string>& kv) {
    ExperimentConfig c;
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        return it->second;
    };
    if (auto v = get("lattice")) c.lattice_path = *v;
    if (auto v = get("point")) c.point_path = *v;
    if (auto v = get("chains")) c.chain_paths = split_list(*v);
    if (auto v = get("D")) c.D = to_i64(*v);
    if (auto v = get("jmin")) c.jmin = static_cast<int>(to_i64(*v));
    if (auto v = get("jmax")) c.jmax = static_cast<int>(to_i64(*v));
    if (auto v = get("kappa")) c.kappa = std::stod(*v);
    if (auto v = get("cusp_constant")) c.cusp_constant = std::stod(*v);
    if (auto v = get("h_omega")) c.h_omega = std::stod(*v);
    if (auto v = get("aut_arch")) c.aut_arch = std::stod(*v);
    if (auto v = get("P_trunc")) c.P_trunc = to_i64(*v);
    if (auto v = get("seed")) c.seed = static_cast<u64>(to_i64(*v));
    if (auto v = get("threads")) c.threads = static_cast<int>(to_i64(*v));
    if (auto v = get("shellmax")) c.shellmax = static_cast<int>(to_i64(*v));
    if (auto v = get("budget")) c.budget = static_cast<u64>(to_i64(*v));
    if (c.D < 1) throw input_error("config: D must be >= 1");
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    return from_map(load_config(path));
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream os;
    os << "lattice=" << lattice_path << ";point=" << point_path << ";chains=";
    for (const auto& p : chain_paths) os << p << ",";
    os << ";D=" << D << ";jmin=" << jmin << ";jmax=" << jmax
       << ";kappa=" << format_real(kappa)
       << ";cusp=" << format_real(cusp_constant)
       << ";h_omega=" << format_real(h_omega)
       << ";aut=" << format_real(aut_arch) << ";P=" << P_trunc
       << ";seed=" << seed << ";shellmax=" << shellmax << ";budget=" << budget;
    return os.str();
}

void ExperimentConfig::apply_threads() const {
    if (threads > 0) omp_set_num_threads(threads);
}

LedgerResult run_ledger(const ExperimentConfig& config, std::ostream* out) {
    if (config.lattice_path.empty() || config.point_path.empty())
        throw input_error("ledger needs lattice and point paths");
    config.apply_threads();
    IntegralLattice lat = load_lattice(config.lattice_path);
    PeriodPoint pt = load_period_point(lat, config.point_path);
    std::vector<ChainModel> places;
    for (const auto& path : config.chain_paths)
        places.push_back(load_chain_model(path));
    const int b = lat.b();

    LedgerResult result;
    for (int j = config.jmin; j <= config.jmax; ++j) {
        i64 m = config.D * i64(j) * i64(j);
        HeightLedgerRow row;
        row.m = m;
        auto rep = Phi_m(lat, pt, config.D, m, config.kappa, config.shellmax,
                         config.P_trunc, config.budget);
        row.archimedean_sum = rep.Phi / config.aut_arch;
        row.uncertainty = rep.uncertainty / config.aut_arch;
        for (const auto& place : places) {
            mpq_class inter = local_intersection(place, m, config.budget);
            row.finite_sum += inter.get_d() * std::log(double(place.p));
        }
        auto am = a_of_m(lat, m, config.P_trunc, config.budget);
        row.height_estimate = (-am.c_value / 2.0) * config.h_omega
                              + config.cusp_constant
                                    * std::pow(double(m), (2.0 + b) / 4.0);
        row.residual = row.archimedean_sum + row.finite_sum - row.height_estimate;
        result.rows.push_back(row);
    }

    // dyadic windows covering the requested range
    i64 m_lo = config.D * i64(config.jmin) * i64(config.jmin);
    i64 m_hi = config.D * i64(config.jmax) * i64(config.jmax);
    for (i64 X = 1; X <= m_hi; X *= 2) {
        if (2 * X <= m_lo) continue;
        LedgerWindow w;
        w.X = X;
        bool any = false;
        for (const auto& row : result.rows) {
            if (row.m < X || row.m >= 2 * X) continue;
            any = true;
            w.arch_aggregate += row.archimedean_sum;
            w.finite_aggregate += row.finite_sum;
        }
        if (!any) continue;
        double norm = std::pow(double(X), (b + 1) / 2.0) * std::log(double(X));
        w.arch_normalized = w.arch_aggregate / norm;
        w.finite_normalized = w.finite_aggregate / norm;
        result.windows.push_back(w);
    }

    if (out) {
        CsvWriter csv(*out, config.canonical(),
                      {"kind", "m_or_X", "arch", "finite", "height_estimate",
                       "residual", "arch_normalized", "finite_normalized"});
        for (const auto& row : result.rows)
            csv.row({"m", std::to_string(row.m), format_real(row.archimedean_sum),
                     format_real(row.finite_sum), format_real(row.height_estimate),
                     format_real(row.residual), "", ""});
        for (const auto& w : result.windows)
            csv.row({"window", std::to_string(w.X), format_real(w.arch_aggregate),
                     format_real(w.finite_aggregate), "", "",
                     format_real(w.arch_normalized), format_real(w.finite_normalized)});
    }
    return result;
}

} // namespace qlat

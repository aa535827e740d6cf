// qlat: densities, Eisenstein coefficients, Green-function sums and lattice
// chains for even quadratic lattices, from plain-text inputs to CSV.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>

#include "qlat/acceptance.hpp"
#include "qlat/chain.hpp"
#include "qlat/density.hpp"
#include "qlat/eisenstein.hpp"
#include "qlat/errors.hpp"
#include "qlat/green.hpp"
#include "qlat/harness.hpp"
#include "qlat/io.hpp"

#include <omp.h>

using namespace qlat;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_path;
    int threads = 0;
    u64 seed = 1;

    void setup() const {
        if (threads > 0) omp_set_num_threads(threads);
    }
    std::ostream& out() {
        if (out_path.empty()) return std::cout;
        if (!sink) {
            sink = std::make_unique<std::ofstream>(out_path);
            if (!*sink) throw input_error("cannot open output file " + out_path);
        }
        return *sink;
    }
    std::map<std::string, std::string> config() const {
        if (config_path.empty()) return {};
        return load_config(config_path);
    }

private:
    std::unique_ptr<std::ofstream> sink;
};

std::string rational(const mpq_class& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadratic lattice toolbox"};
    app.require_subcommand(1);
    GlobalOpts g;
    app.add_option("--config", g.config_path, "key=value config file");
    app.add_option("--threads", g.threads, "OpenMP thread count (0 = default)");
    app.add_option("--seed", g.seed, "random seed for Monte Carlo paths");
    app.add_option("--out", g.out_path, "output path (default stdout)");

    std::string lat_path, point_path, model_path;
    i64 p = 3, m = 1, D = 1, X = 64, P_trunc = 200, pmax = 7, mmax = 20;
    i64 mmin = 1;
    int n = 1, shellmax = 10000, jmax = 20;
    double T = 1.0, kappa = 0.0;
    bool parts = false, list_vectors = false;
    std::string method = "recursion";

    // ---- density ----
    auto* density = app.add_subcommand("density", "local densities mu_p(m,n)");
    density->fallthrough();
    density->add_option("--lattice", lat_path)->required();
    density->add_option("--p", p);
    density->add_option("--m", m);
    density->add_option("--n", n);
    density->add_option("--method", method)
        ->check(CLI::IsMember({"brute", "recursion"}));
    density->add_flag("--parts", parts);
    density->callback([&] {
        if (!density->get_subcommands().empty()) return;
        g.setup();
        auto lat = load_lattice(lat_path);
        if (method == "brute") {
            mpz_class cnt = count_brute(lat, p, n, m);
            mpq_class mu(cnt, zpow(p, i64(n) * (lat.rank() - 1)));
            mu.canonicalize();
            g.out() << rational(mu) << "\n";
            return;
        }
        auto v = mu_p(lat, p, m, n, parts);
        g.out() << rational(v.value) << "\n";
        if (parts && v.has_parts)
            g.out() << "good " << rational(v.good) << "\nbad " << rational(v.bad)
                    << "\nzero " << rational(v.zero) << "\n";
    });

    auto* verify = density->add_subcommand("verify", "sweep recursion vs brute force");
    verify->add_option("--pmax", pmax);
    verify->add_option("--mmax", mmax);
    verify->callback([&] {
        g.setup();
        auto lat = load_lattice(lat_path);
        const int r = lat.rank();
        CsvWriter csv(g.out(), "density verify " + lat_path,
                      {"p", "m", "n", "mu_num", "mu_den", "brute_match", "deviation"});
        for (i64 pp : primes_up_to(pmax)) {
            for (i64 mm = 1; mm <= mmax; ++mm) {
                for (int nn = 0; nn <= 3; ++nn) {
                    auto val = mu_p(lat, pp, mm, nn);
                    mpz_class cnt = count_brute(lat, pp, nn, mm);
                    mpq_class brute(cnt, zpow(pp, i64(nn) * (r - 1)));
                    brute.canonicalize();
                    mpq_class dev = abs(val.value - brute);
                    csv.row({std::to_string(pp), std::to_string(mm),
                             std::to_string(nn), val.value.get_num().get_str(),
                             val.value.get_den().get_str(),
                             val.value == brute ? "1" : "0",
                             format_real(dev.get_d())});
                }
            }
        }
    });

    // ---- count ----
    auto* count = app.add_subcommand("count", "constrained representation counts");
    count->add_option("--lattice", lat_path)->required();
    count->add_option("--point", point_path)->required();
    count->add_option("--m", m)->required();
    count->add_option("--T", T);
    count->add_flag("--list", list_vectors);
    count->callback([&] {
        g.setup();
        auto lat = load_lattice(lat_path);
        auto pt = load_period_point(lat, point_path);
        auto reps = enumerate_representations(lat, pt, m, T);
        g.out() << reps.size() << "\n";
        if (list_vectors)
            for (const auto& v : reps)
                for (int i = 0; i < v.size(); ++i)
                    g.out() << v[i] << (i + 1 == v.size() ? "\n" : " ");
    });

    // ---- eisenstein ----
    auto* eis = app.add_subcommand("eisenstein", "beta = 0 coefficient layer");
    eis->fallthrough();
    eis->add_option("--lattice", lat_path)->required();
    eis->add_option("--D", D);
    eis->add_option("--m", m);
    eis->add_option("--ptrunc", P_trunc);
    eis->add_option("--kappa", kappa);
    const std::vector<std::string> eis_cols = {
        "m", "a", "c", "trunc_error", "sigma_k", "sigma_logderiv", "bprime_ratio"};
    auto eis_row = [&](CsvWriter& csv, const IntegralLattice& lat, i64 mm) {
        auto am = a_of_m(lat, mm, P_trunc);
        auto sig = sigma_m(lat, D, mm);
        double ratio = bprime_ratio(lat, D, mm, kappa);
        csv.row({std::to_string(mm), format_real(am.a_value),
                 format_real(am.c_value), format_real(am.trunc_error),
                 format_real(sig.value_at_k), format_real(sig.logderiv_at_k),
                 format_real(ratio)});
    };
    eis->callback([&] {
        if (!eis->get_subcommands().empty()) return;
        g.setup();
        auto lat = load_lattice(lat_path);
        CsvWriter csv(g.out(), "eisenstein " + lat_path, eis_cols);
        eis_row(csv, lat, m);
    });
    auto* eis_sweep = eis->add_subcommand("sweep", "m = D j^2 for j <= jmax");
    eis_sweep->add_option("--jmax", jmax);
    eis_sweep->callback([&] {
        g.setup();
        auto lat = load_lattice(lat_path);
        CsvWriter csv(g.out(), "eisenstein sweep " + lat_path, eis_cols);
        for (int j = 1; j <= jmax; ++j) eis_row(csv, lat, D * i64(j) * j);
    });

    // ---- green ----
    auto* green = app.add_subcommand("green", "archimedean Green-function sums");
    green->fallthrough();
    green->add_option("--lattice", lat_path)->required();
    green->add_option("--point", point_path)->required();
    green->add_option("--m", m);
    green->add_option("--D", D);
    green->add_option("--kappa", kappa);
    green->add_option("--shellmax", shellmax);
    green->add_option("--ptrunc", P_trunc);
    const std::vector<std::string> green_cols = {
        "m", "count", "A", "A_mt", "A_er", "phi_tilde", "R_x", "Phi",
        "uncertainty"};
    auto green_row = [&](CsvWriter& csv, const IntegralLattice& lat,
                         const PeriodPoint& pt, i64 mm) {
        auto full = Phi_m(lat, pt, D, mm, kappa, shellmax, P_trunc);
        auto rep = A_of_m(lat, pt, mm, u64(1) << 31, 0);
        csv.row({std::to_string(mm), std::to_string(rep.count),
                 format_real(rep.A), format_real(rep.A_mt), format_real(rep.A_er),
                 format_real(full.phi_tilde), format_real(full.R_x),
                 format_real(full.Phi), format_real(full.uncertainty)});
    };
    green->callback([&] {
        if (!green->get_subcommands().empty()) return;
        g.setup();
        auto lat = load_lattice(lat_path);
        auto pt = load_period_point(lat, point_path);
        CsvWriter csv(g.out(), "green " + lat_path, green_cols);
        green_row(csv, lat, pt, m);
    });
    auto* green_sweep = green->add_subcommand("sweep", "m = D j^2 in [mmin, mmax]");
    green_sweep->add_option("--mmin", mmin);
    green_sweep->add_option("--mmax", mmax);
    green_sweep->callback([&] {
        g.setup();
        auto lat = load_lattice(lat_path);
        auto pt = load_period_point(lat, point_path);
        CsvWriter csv(g.out(), "green sweep " + lat_path, green_cols);
        for (i64 j = 1; D * j * j <= mmax; ++j) {
            i64 mm = D * j * j;
            if (mm < mmin) continue;
            green_row(csv, lat, pt, mm);
        }
    });
    auto* badset = green->add_subcommand("badset", "m in [X,2X) with large A_er");
    badset->add_option("--X", X)->required();
    badset->callback([&] {
        g.setup();
        auto lat = load_lattice(lat_path);
        auto pt = load_period_point(lat, point_path);
        CsvWriter csv(g.out(), "green badset " + lat_path, {"m"});
        for (i64 bm : classify_bad(lat, pt, X)) csv.row({std::to_string(bm)});
    });

    // ---- chain ----
    auto* chain = app.add_subcommand("chain", "special-endomorphism lattice chains");
    chain->fallthrough();
    chain->add_option("--model", model_path)->required();
    chain->add_option("--m", m);
    auto chain_header = [&](const ChainModel& model) {
        std::vector<std::string> cols = {"n"};
        for (int i = 1; i <= model.rank(); ++i)
            cols.push_back("mu_" + std::to_string(i));
        cols.push_back("a_r");
        cols.push_back("count");
        return cols;
    };
    auto chain_rows = [&](CsvWriter& csv, const ChainModel& model, i64 probe,
                          std::function<u64(const IntegralLattice&)> counter) {
        int consecutive_empty = 0;
        for (int nn = model.n0; model.depth_k(nn) <= model.precision; ++nn) {
            auto lvl = chain_lattice(model, nn);
            auto prof = successive_minima(lvl.lat);
            u64 cnt = counter(lvl.lat);
            std::vector<std::string> row = {std::to_string(nn)};
            for (double mu : prof.mu) row.push_back(format_real(mu));
            row.push_back(format_real(prof.a[static_cast<size_t>(model.rank())]));
            row.push_back(std::to_string(cnt));
            csv.row(row);
            u64 upto = 0;
            visit_short_vectors(lvl.lat, probe, u64(1) << 31, false,
                                [&](int, const i64*, i64 q) { if (q > 0) ++upto; });
            if (upto == 0) ++consecutive_empty; else consecutive_empty = 0;
            if (consecutive_empty >= 3) break;
        }
    };
    chain->callback([&] {
        if (!chain->get_subcommands().empty()) return;
        g.setup();
        auto model = load_chain_model(model_path);
        CsvWriter csv(g.out(), "chain " + model_path, chain_header(model));
        chain_rows(csv, model, m, [&](const IntegralLattice& lvl) {
            u64 c = 0;
            visit_short_vectors(lvl, m, u64(1) << 31, false,
                                [&](int, const i64*, i64 q) { if (q == m) ++c; });
            return c;
        });
        mpq_class inter = local_intersection(model, m);
        g.out() << "# local_intersection " << rational(inter) << "\n";
    });
    auto* chain_sweep = chain->add_subcommand("sweep", "counts over S_{D,X} per level");
    chain_sweep->add_option("--D", D)->required();
    chain_sweep->add_option("--X", X)->required();
    chain_sweep->callback([&] {
        g.setup();
        auto model = load_chain_model(model_path);
        CsvWriter csv(g.out(), "chain sweep " + model_path, chain_header(model));
        chain_rows(csv, model, 2 * X - 1, [&](const IntegralLattice& lvl) {
            u64 c = 0;
            visit_short_vectors(lvl, 2 * X - 1, u64(1) << 31, false,
                                [&](int, const i64*, i64 q) {
                if (q < X || q >= 2 * X || q % D != 0) return;
                if (is_perfect_square(mpz_class(q / D))) ++c;
            });
            return c;
        });
    });

    // ---- ledger ----
    auto* ledger = app.add_subcommand("ledger", "height ledger over m = D j^2");
    ledger->callback([&] {
        auto cfg = ExperimentConfig::from_map(g.config());
        if (g.threads > 0) cfg.threads = g.threads;
        if (g.seed != 1) cfg.seed = g.seed;
        run_ledger(cfg, &g.out());
    });

    // ---- suite ----
    auto* suite = app.add_subcommand("suite", "acceptance battery");
    std::string fixtures_dir = "fixtures";
    std::vector<int> only;
    suite->add_option("--fixtures", fixtures_dir, "fixture directory");
    suite->add_option("--only", only, "criterion ids to run");
    suite->callback([&] {
        g.setup();
        auto results = run_acceptance(fixtures_dir, std::cerr, only, g.threads);
        write_acceptance_report(results, g.out());
        for (const auto& r : results)
            if (!r.pass) throw error("criterion failure");
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const budget_error& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const error& e) {
        std::string what = e.what();
        if (what == "criterion failure") return 1;
        std::cerr << "error: " << what << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

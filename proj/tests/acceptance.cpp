// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion re-derives its expected values independently of
// the library internals wherever a check is more than a direct assertion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "wfopt/bo_engine.hpp"
#include "wfopt/objectives.hpp"
#include "wfopt/pareto.hpp"
#include "wfopt/reporting.hpp"
#include "wfopt/set_gp.hpp"
#include "wfopt/wake.hpp"
#include "wfopt/wind_stats.hpp"

using namespace wfopt;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(const char* name, bool ok) {
    std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name);
    if (!ok) ++failures;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// --- criterion 1: installation cost fidelity --------------------------------

bool check_cost_fidelity() {
    return near(installation_cost(2), 1.99, 0.01) && near(installation_cost(97), 64.67, 0.01) &&
           near(installation_cost(228), 152.00, 0.01);
}

// --- criterion 2: wake analytics ---------------------------------------------

// independent brute-force Jensen evaluation via explicit rotation matrices
std::vector<double> oracle_speeds(const Layout& layout, double v0, double theta_deg,
                                  const WakeConfig& cfg) {
    const double alpha = *cfg.decay_constant;
    const double phi = (theta_deg + 180.0) * std::numbers::pi / 180.0;
    const double c = std::cos(phi), s = std::sin(phi);
    std::vector<std::pair<double, double>> rot;
    for (const auto& t : layout) rot.emplace_back(c * t.x - s * t.y, s * t.x + c * t.y);
    std::vector<double> out;
    for (std::size_t j = 0; j < layout.size(); ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < layout.size(); ++i) {
            if (i == j) continue;
            const double d_down = rot[j].second - rot[i].second;
            const double d_cross = std::abs(rot[j].first - rot[i].first);
            if (d_down > 0.0 && d_cross < cfg.rotor_radius + alpha * d_down) {
                const double frac = (1.0 - std::sqrt(1.0 - cfg.thrust_coefficient)) /
                                    std::pow(1.0 + alpha * d_down / cfg.rotor_radius, 2.0);
                acc += frac * frac;
            }
        }
        out.push_back(std::min(std::max(v0 * (1.0 - std::sqrt(acc)), 0.0), v0));
    }
    return out;
}

bool check_wake_analytics() {
    WakeConfig cfg;
    cfg.rotor_radius = 41.0;
    cfg.decay_constant = 0.0943;

    // no thrust, no deficit
    cfg.thrust_coefficient = 0.0;
    for (double d : {0.0, 100.0, 1000.0})
        if (wake_deficit(d, cfg) != 0.0) return false;

    // D = 0, C_T = 0.75: v1 = 0.5 v0 exactly
    cfg.thrust_coefficient = 0.75;
    if (single_wake_speed(8.0, 0.0, cfg) != 0.5 * 8.0) return false;

    // 200 seeded random 5-turbine cases against the brute-force oracle
    cfg.thrust_coefficient = 0.8;
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> coord(-2000.0, 2000.0);
    std::uniform_real_distribution<double> theta(0.0, 360.0);
    for (int trial = 0; trial < 200; ++trial) {
        Layout layout;
        for (int i = 0; i < 5; ++i) layout.add({coord(rng), coord(rng)});
        const double t = theta(rng);
        const auto got = effective_speeds(layout, 10.0, t, cfg);
        const auto want = oracle_speeds(layout, 10.0, t, cfg);
        for (std::size_t i = 0; i < got.size(); ++i)
            if (!near(got[i], want[i], 1e-9)) return false;
    }
    return true;
}

// --- criterion 3: set-GP suite ------------------------------------------------

Layout random_layout(std::mt19937_64& rng, int min_count, int max_count, double extent = 3000.0) {
    std::uniform_int_distribution<int> count(min_count, max_count);
    std::uniform_real_distribution<double> coord(0.0, extent);
    Layout l;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) l.add({coord(rng), coord(rng)});
    return l;
}

double oracle_lml(const std::vector<Layout>& sets, const Eigen::VectorXd& y, const Hyperparams& h) {
    const auto n = static_cast<Eigen::Index>(sets.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double sum = 0.0;
            for (const auto& a : sets[static_cast<std::size_t>(i)])
                for (const auto& b : sets[static_cast<std::size_t>(j)])
                    sum += h.signal_variance * std::exp(-squared_distance(a, b) /
                                                        (2.0 * h.length_scale * h.length_scale));
            K(i, j) = sum / (static_cast<double>(sets[static_cast<std::size_t>(i)].size()) *
                             static_cast<double>(sets[static_cast<std::size_t>(j)].size()));
            if (i == j) K(i, j) += h.noise_variance;
        }
    const Eigen::MatrixXd Kinv = K.inverse();
    return -0.5 * y.dot(Kinv * y) - 0.5 * std::log(K.determinant()) -
           0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
}

bool check_set_gp() {
    std::mt19937_64 rng(555);

    // exact permutation invariance
    const Hyperparams h{246.0, 1.0, 0.01};
    for (int trial = 0; trial < 50; ++trial) {
        const Layout a = random_layout(rng, 2, 8);
        const Layout b = random_layout(rng, 2, 8);
        std::vector<Turbine> shuffled = a.turbines();
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        if (set_kernel(Layout(shuffled), b, h) != set_kernel(a, b, h)) return false;
        if (set_kernel(a, b, h) != set_kernel(b, a, h)) return false;
    }

    // PSD via Cholesky on 50 random batches
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Layout> sets;
        for (int i = 0; i < 25; ++i) sets.push_back(random_layout(rng, 1, 6));
        Eigen::MatrixXd K = covariance_matrix(sets, Hyperparams{300.0, 1.0, 0.0});
        K += 1e-10 * Eigen::MatrixXd::Identity(K.rows(), K.cols());
        if (Eigen::LLT<Eigen::MatrixXd>(K).info() != Eigen::Success) return false;
    }

    // interpolation at sigma_n^2 = 0
    {
        std::vector<Layout> sets;
        for (int i = 0; i < 8; ++i) sets.push_back(random_layout(rng, 2, 5));
        Eigen::VectorXd y(8);
        std::normal_distribution<double> gauss(0.0, 2.0);
        for (int i = 0; i < 8; ++i) y[i] = gauss(rng);
        const SetGpModel model(sets, y, Hyperparams{500.0, 1.0, 0.0});
        for (int i = 0; i < 8; ++i)
            if (!near(model.predict(sets[static_cast<std::size_t>(i)]).mean, y[i], 1e-8))
                return false;
    }

    // dense-inverse oracle equivalence (likelihood and posterior) for N <= 20
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + 3 * trial % 16 + 5;  // sizes in [5, 20]
        std::vector<Layout> sets;
        for (int i = 0; i < n; ++i) sets.push_back(random_layout(rng, 1, 5));
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) y[i] = gauss(rng);
        const Hyperparams hp{400.0, 2.0, 0.1};
        if (!near(log_marginal_likelihood(sets, y, hp), oracle_lml(sets, y, hp), 1e-8))
            return false;

        // posterior oracle in normalized space
        const SetGpModel model(sets, y, hp);
        const double mean = y.mean();
        const double var = (y.array() - mean).square().sum() / y.size();
        const double scale = var > 0.0 ? std::sqrt(var) : 1.0;
        const Eigen::VectorXd yn = (y.array() - mean) / scale;
        const Eigen::MatrixXd Kinv = covariance_matrix(sets, hp).inverse();
        const Layout q = random_layout(rng, 1, 5);
        Eigen::VectorXd k(n);
        for (int i = 0; i < n; ++i) k[i] = set_kernel(q, sets[static_cast<std::size_t>(i)], hp);
        const double want_mean = k.dot(Kinv * yn) * scale + mean;
        const double want_var =
            std::max(set_kernel(q, q, hp) - k.dot(Kinv * k), 0.0) * scale * scale;
        const auto pred = model.predict(q);
        if (!near(pred.mean, want_mean, 1e-8) || !near(pred.variance, want_var, 1e-8))
            return false;
    }
    return true;
}

// --- criterion 4: EHVI correctness --------------------------------------------

// O(k) hypervolume improvement against a sorted non-dominated staircase;
// used to keep the 2e6-sample Monte Carlo oracle inside the time budget
double fast_improvement(const std::vector<ObjVec>& stair, const ObjVec& ref, double y0, double y1) {
    if (y0 >= ref[0] || y1 >= ref[1]) return 0.0;
    double total = 0.0;
    double x = y0;
    double g = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    while (k < stair.size() && stair[k][0] <= x) {
        g = std::min(g, stair[k][1]);
        ++k;
    }
    while (true) {
        const double xn = (k < stair.size() && stair[k][0] < ref[0]) ? stair[k][0] : ref[0];
        const double height = std::min(g, ref[1]) - y1;
        if (height > 0.0) total += (xn - x) * height;
        if (xn >= ref[0]) break;
        g = std::min(g, stair[k][1]);
        ++k;
        x = xn;
    }
    return total;
}

bool check_ehvi() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const ObjVec ref{2.0, 2.0};

    int compared = 0;
    for (int trial = 0; compared < 50 && trial < 500; ++trial) {
        std::vector<ObjVec> cand;
        for (int i = 0; i < 5; ++i) cand.push_back({2.0 * unit(rng) - 0.5, 2.0 * unit(rng) - 0.5});
        auto stair = non_dominated(cand, ref).points();
        std::sort(stair.begin(), stair.end(),
                  [](const ObjVec& a, const ObjVec& b) { return a[0] < b[0]; });

        PredictiveBox box;
        box.mean = {unit(rng) * 2.4 - 0.5, unit(rng) * 2.4 - 0.5};
        box.stddev = {unit(rng) * 0.55 + 0.05, unit(rng) * 0.55 + 0.05};

        // sigma -> 0 degeneracy against hv_improvement, 1e-6 relative
        const double exact_hvi = hv_improvement(stair, ref, box.mean);
        const double degenerate = ehvi(stair, ref, {box.mean, {0.0, 0.0}});
        if (!near(degenerate, exact_hvi, 1e-6 * std::max(std::abs(exact_hvi), 1e-12)))
            return false;

        // the fast improvement must agree with the definitional one
        for (int s = 0; s < 50; ++s) {
            const double a = box.mean[0] + box.stddev[0] * gauss(rng);
            const double b = box.mean[1] + box.stddev[1] * gauss(rng);
            if (!near(fast_improvement(stair, ref, a, b), hv_improvement(stair, ref, {a, b}),
                      1e-10))
                return false;
        }

        // 2e6-sample Monte Carlo within 3 standard errors. Instances whose
        // improving region carries negligible probability give a sampled
        // standard error of zero, so no yardstick exists; resample those.
        const double exact = ehvi(stair, ref, box);
        if (exact < 1e-5) continue;
        ++compared;
        const std::size_t n = 2000000;
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            const double imp = fast_improvement(stair, ref, box.mean[0] + box.stddev[0] * gauss(rng),
                                                box.mean[1] + box.stddev[1] * gauss(rng));
            sum += imp;
            sum_sq += imp * imp;
        }
        const double mc = sum / static_cast<double>(n);
        const double se =
            std::sqrt(std::max(sum_sq / static_cast<double>(n) - mc * mc, 0.0) / static_cast<double>(n));
        if (!near(exact, mc, 3.0 * se + 1e-12)) return false;
    }
    return compared == 50;
}

// --- criterion 5: hypervolume --------------------------------------------------

bool check_hypervolume() {
    const ObjVec ref{2.0, 2.0};
    if (hypervolume({{1.0, 1.0}}, ref) != 1.0) return false;
    if (hypervolume({{0.0, 1.0}, {1.0, 0.0}}, ref) != 3.0) return false;

    // definitional recheck of incremental HVI on random archives
    std::mt19937_64 rng(888);
    std::uniform_real_distribution<double> unit(-0.5, 1.9);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<ObjVec> pts;
        for (int i = 0; i < 5; ++i) pts.push_back({unit(rng), unit(rng)});
        const auto archive = non_dominated(pts, ref).points();
        const ObjVec y{unit(rng), unit(rng)};
        double expected = 0.0;
        if (y[0] < ref[0] && y[1] < ref[1]) {
            auto with = archive;
            with.push_back(y);
            expected = hypervolume(non_dominated(with, ref).points(), ref) -
                       hypervolume(archive, ref);
        }
        if (!near(hv_improvement(archive, ref, y), expected, 1e-12)) return false;
    }
    return true;
}

// --- criteria 6 and 8: end-to-end desk scale and determinism --------------------

WindDistribution synthetic_distribution() {
    WindDistribution d;
    d.v_max = 14;
    d.bandwidth = Eigen::Matrix2d::Identity();
    d.table.assign(static_cast<std::size_t>(15) * 360, 0.0);
    d.at(8, 0) = 0.35;
    d.at(10, 90) = 0.25;
    d.at(12, 225) = 0.25;
    d.at(6, 300) = 0.15;
    return d;
}

RunConfig desk_config() {
    RunConfig c;
    c.n_initial = 10;
    c.max_evaluations = 30;
    c.grid.rows = 6;
    c.grid.cols = 6;
    c.wake.rotor_radius = 41.0;
    c.wake.thrust_coefficient = 0.8;
    c.wake.decay_constant = 0.0943;
    c.power.scale_kw = 1500.0;
    c.power.n = 60.0;
    c.power.tau = 2.0;
    c.power.cut_in = 3.5;
    c.ga.population = 40;
    c.ga.generations = 30;
    c.de.population_per_dim = 6;
    c.de.max_generations = 25;
    return c;
}

double final_hv(const RunResult& r) { return r.trace.records.back().hypervolume; }

bool trace_non_decreasing(const RunResult& r) {
    double prev = 0.0;
    for (const auto& rec : r.trace.records) {
        if (rec.hypervolume < prev - 1e-12) return false;
        prev = rec.hypervolume;
    }
    return true;
}

bool check_end_to_end() {
    const auto start = std::chrono::steady_clock::now();
    const auto dist = synthetic_distribution();
    const auto config = desk_config();

    std::vector<double> bo_final, rs_final;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto bo = run(config, dist, seed);
        const auto rs = random_search_baseline(config, dist, seed);
        if (bo.evaluations.size() != 30 || rs.evaluations.size() != 30) return false;
        if (!trace_non_decreasing(bo) || !trace_non_decreasing(rs)) return false;
        bo_final.push_back(final_hv(bo));
        rs_final.push_back(final_hv(rs));
    }
    std::sort(bo_final.begin(), bo_final.end());
    std::sort(rs_final.begin(), rs_final.end());
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - start);
    if (elapsed.count() > 600) return false;
    return bo_final[1] >= rs_final[1];  // median over 3 seeds
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool check_determinism() {
    const auto dist = synthetic_distribution();
    auto config = desk_config();
    config.grid.rows = 4;
    config.grid.cols = 4;
    config.n_initial = 4;
    config.max_evaluations = 8;
    config.ga.population = 20;
    config.ga.generations = 10;

    const auto dir = fs::temp_directory_path() / "wfopt_acceptance";
    fs::remove_all(dir);
    for (const char* tag : {"a", "b"}) {
        auto cfg = config;
        cfg.state_path = dir / tag / "state.json";
        fs::create_directories(dir / tag);
        write_run_artifacts(run(cfg, dist, 42), dir / tag);
        save_distribution(dist, dir / tag / "dist.txt");
    }
    for (const char* file : {"pareto_front.tsv", "hv_trace.tsv", "state.json", "dist.txt"})
        if (slurp(dir / "a" / file) != slurp(dir / "b" / file)) return false;
    const bool ok = fs::exists(dir / "a" / "layouts") &&
                    slurp(dir / "a" / "pareto_front.tsv").size() > 0;
    fs::remove_all(dir);
    return ok;
}

// --- criterion 7: six-farm correlation structure --------------------------------

bool check_six_farms() {
    const Hyperparams h{246.0, 1.0, 1.0};
    auto shift = [](const Layout& l, double dx, double dy) {
        Layout out;
        for (const auto& t : l) out.add({t.x + dx, t.y + dy});
        return out;
    };
    const Layout a({{0, 0}, {246, 0}, {0, 246}, {246, 246}, {123, 492}});
    const Layout b = shift(a, 30.0, -20.0);
    const Layout c({{4000, 4000}, {4250, 4000}, {4000, 4250}});
    const Layout d = shift(c, -25.0, 15.0);
    const Layout e({{0, 4500}, {500, 4000}, {1000, 3500}, {1500, 3000}});
    const Layout f = shift(e, 10.0, 35.0);

    const std::vector<Layout> farms{a, b, c, d, e, f};
    const auto K = covariance_matrix(farms, h);

    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            if (i != j && !(K(i, i) > K(i, j))) return false;

    const int pair_of[6] = {1, 0, 3, 2, 5, 4};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (j == i || j == pair_of[i]) continue;
            if (!(K(i, pair_of[i]) > K(i, j))) return false;
        }
    return true;
}

}  // namespace

int main() {
    report("1 cost fidelity", check_cost_fidelity());
    report("2 wake analytics vs brute-force oracle", check_wake_analytics());
    report("3 set-GP suite", check_set_gp());
    report("4 EHVI exactness vs Monte Carlo", check_ehvi());
    report("5 hypervolume and incremental HVI", check_hypervolume());
    report("6 end-to-end BO vs random search", check_end_to_end());
    report("7 six-farm correlation structure", check_six_farms());
    report("8 determinism of result files", check_determinism());
    return failures == 0 ? 0 : 1;
}

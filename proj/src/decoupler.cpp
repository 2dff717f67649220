#include "dtn/decoupler.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dtn/errors.hpp"
#include "dtn/sequences.hpp"

namespace dtn {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

struct InversePowerFit {
    double alpha = 0;
    Eigen::VectorXd coeffs;
    Eigen::VectorXd standard_errors;
};

/// x_j ≈ αj + Σ_{i<terms} c_i j^{−i−1}, fitted jointly in α and c with
/// standard errors from the residual.
InversePowerFit fit_inverse_powers(const std::vector<double>& j, const std::vector<double>& x, int terms) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const int cols = terms + 1;
    if (rows < cols + 2) throw InsufficientData("coefficient fit: too few indices");
    const double j_lo = *std::min_element(j.begin(), j.end());
    // Rows are x_j·j; columns (j/j_lo)², then powers of u = j_lo/j.
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const double u = j_lo / j[r];
        A(r, 0) = 1 / (u * u);
        double p = 1;
        for (int i = 0; i < terms; ++i) {
            A(r, i + 1) = p;
            p *= u;
        }
        b(r) = x[r] * j[r];
    }
    const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(b);
    const double rss = (A * sol - b).squaredNorm();
    const double variance = rss / static_cast<double>(rows - cols);
    const Eigen::MatrixXd cov = (A.transpose() * A).inverse() * variance;
    InversePowerFit fit{sol(0) / (j_lo * j_lo), Eigen::VectorXd(terms), Eigen::VectorXd(terms)};
    double scale = 1;
    for (int i = 0; i < terms; ++i) {
        fit.coeffs(i) = sol(i + 1) * scale;
        fit.standard_errors(i) = std::sqrt(std::max(cov(i + 1, i + 1), 0.0)) * scale;
        scale *= j_lo;
    }
    return fit;
}

/// Points of one candidate family at each index j (equal count per j).
struct Family {
    std::map<int, std::vector<double>> points;
    std::size_t size() const { return points.empty() ? 0 : points.begin()->second.size(); }
};

struct ClusterContext {
    double alpha;
    int N;
    std::vector<double> fit_start_fractions;
    std::vector<int> extra_terms;
    double gap_floor;
    int min_indices;
    std::vector<double>* gap_log;
};

/// Coefficients s_1..s_N of a family from the mean of its points. Among
/// the candidate fit windows and nuisance-term counts, the fit with the
/// smallest standard error on s_N wins.
InversePowerFit fit_family(const Family& f, const ClusterContext& ctx) {
    const int j_hi = f.points.rbegin()->first;
    std::vector<double> js;
    std::vector<double> means;
    for (const auto& [j, pts] : f.points) {
        js.push_back(j);
        means.push_back(std::accumulate(pts.begin(), pts.end(), 0.0) / static_cast<double>(pts.size()));
    }
    std::optional<InversePowerFit> best;
    for (const double fraction : ctx.fit_start_fractions) {
        const auto first = static_cast<std::size_t>(
            std::lower_bound(js.begin(), js.end(), fraction * j_hi) - js.begin());
        const std::vector<double> j(js.begin() + static_cast<std::ptrdiff_t>(first), js.end());
        const std::vector<double> x(means.begin() + static_cast<std::ptrdiff_t>(first), means.end());
        for (const int extra : ctx.extra_terms) {
            const int terms = ctx.N + extra;
            if (static_cast<int>(j.size()) < terms + 4) continue;
            InversePowerFit fit = fit_inverse_powers(j, x, terms);
            if (!best || fit.standard_errors(ctx.N - 1) < best->standard_errors(ctx.N - 1)) best = std::move(fit);
        }
    }
    if (!best) throw InsufficientData("coefficient fit: too few indices in every fit window");
    return *best;
}

std::string describe_gaps(const std::vector<double>& gaps, double threshold) {
    std::ostringstream os;
    os << "position gaps [";
    for (std::size_t i = 0; i < gaps.size(); ++i) os << (i ? ", " : "") << gaps[i];
    os << "], threshold " << threshold;
    return os.str();
}

/// Splits families level by level; leaves are components.
void split_family(const Family& family, int level, const std::vector<double>& known, const ClusterContext& ctx,
                  std::vector<std::pair<Family, InversePowerFit>>& leaves) {
    if (static_cast<int>(family.points.size()) < ctx.min_indices) {
        throw InsufficientData("extraction: only " + std::to_string(family.points.size()) +
                               " clean indices remain for a family; need " + std::to_string(ctx.min_indices));
    }
    const std::size_t size = family.size();
    if (level >= ctx.N || size <= 2) {
        if (level >= ctx.N || size == 2) {
            leaves.emplace_back(family, fit_family(family, ctx));
            return;
        }
    }
    const double alpha = fit_family(family, ctx).alpha;
    // Scaled residuals at this level, sorted per index.
    std::map<int, std::vector<std::pair<double, double>>> scaled;
    for (const auto& [j, pts] : family.points) {
        std::vector<std::pair<double, double>> v;
        for (const double x : pts) {
            double r = x - j * alpha;
            double inv = 1;
            for (const double s : known) {
                inv /= j;
                r -= s * inv;
            }
            v.emplace_back(r * std::pow(double(j), level + 1), x);
        }
        std::sort(v.begin(), v.end());
        scaled.emplace(j, std::move(v));
    }
    const int j_hi = family.points.rbegin()->first;
    std::vector<double> position_gaps(size - 1);
    for (std::size_t i = 0; i + 1 < size; ++i) {
        std::vector<double> g;
        for (const auto& [j, v] : scaled) {
            if (j >= ctx.fit_start_fractions.back() * j_hi) g.push_back(v[i + 1].first - v[i].first);
        }
        position_gaps[i] = median(g);
    }
    std::vector<double> sorted_gaps = position_gaps;
    std::sort(sorted_gaps.begin(), sorted_gaps.end());
    // Spacings of merged noisy copies are exchangeable, so the smallest
    // median gap is a noise scale even when the pair structure is broken.
    const double noise = sorted_gaps.front();
    const double largest = sorted_gaps.back();
    const double threshold = std::max({largest / 2, 10 * noise, ctx.gap_floor});
    if (ctx.gap_log) ctx.gap_log->insert(ctx.gap_log->end(), position_gaps.begin(), position_gaps.end());

    std::vector<std::size_t> cuts;
    for (std::size_t i = 0; i + 1 < size; ++i) {
        if (position_gaps[i] > threshold) cuts.push_back(i + 1);
    }
    if (cuts.empty()) {
        const InversePowerFit fit = fit_family(family, ctx);
        std::vector<double> next_known = known;
        next_known.push_back(fit.coeffs(level));
        split_family(family, level + 1, next_known, ctx, leaves);
        return;
    }
    std::vector<std::size_t> bounds{0};
    bounds.insert(bounds.end(), cuts.begin(), cuts.end());
    bounds.push_back(size);
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        if ((bounds[b + 1] - bounds[b]) % 2 != 0) {
            throw AmbiguityError("extraction: odd cluster size at level " + std::to_string(level),
                                 describe_gaps(position_gaps, threshold));
        }
    }
    std::vector<Family> children(bounds.size() - 1);
    for (const auto& [j, v] : scaled) {
        bool clean = true;
        for (std::size_t i = 0; i + 1 < size && clean; ++i) {
            const double gap = v[i + 1].first - v[i].first;
            const bool is_cut = std::find(cuts.begin(), cuts.end(), i + 1) != cuts.end();
            if (is_cut ? gap <= threshold : gap > threshold) clean = false;
        }
        if (!clean) continue;
        for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
            std::vector<double> pts;
            for (std::size_t i = bounds[b]; i < bounds[b + 1]; ++i) pts.push_back(v[i].second);
            children[b].points.emplace(j, std::move(pts));
        }
    }
    for (const Family& child : children) split_family(child, level, known, ctx, leaves);
}

} // namespace

LengthRecovery recover_lengths(const SpectrumSequence& S, const LengthRecoveryOptions& options) {
    if (S.size() < options.min_entries) {
        throw InsufficientData("recover_lengths: " + std::to_string(S.size()) + " entries, need at least " +
                               std::to_string(options.min_entries));
    }
    const Eigen::VectorXd all = S.values();
    std::vector<double> values(all.data(), all.data() + all.size());
    const double v_max = values.back();
    if (!(v_max > 0)) throw InsufficientData("recover_lengths: spectrum has no positive values");
    std::vector<char> alive(values.size(), 1);
    const double f_min = *std::min_element(options.window_fractions.begin(), options.window_fractions.end());
    const auto tail_begin = static_cast<std::size_t>(
        std::lower_bound(values.begin(), values.end(), f_min * v_max) - values.begin());
    auto tail_count = [&] {
        return std::count(alive.begin() + static_cast<std::ptrdiff_t>(tail_begin), alive.end(), 1);
    };
    const auto initial_tail = tail_count();

    LengthRecovery out;
    std::vector<double> found;
    while (static_cast<int>(found.size()) < options.max_classes) {
        const auto remaining = tail_count();
        if (remaining <= std::max<std::ptrdiff_t>(3, static_cast<std::ptrdiff_t>(options.exhausted_fraction *
                                                                                 initial_tail))) {
            break;
        }
        std::vector<double> gaps;
        for (const double f : options.window_fractions) {
            double previous = std::nan("");
            double gap = 0;
            for (std::size_t i = tail_begin; i < values.size(); ++i) {
                if (!alive[i] || values[i] < f * v_max) continue;
                if (!std::isnan(previous)) gap = std::max(gap, values[i] - previous);
                previous = values[i];
            }
            gaps.push_back(gap);
        }
        const double lower = *std::max_element(gaps.begin(), gaps.end());
        if (!(lower > 0)) throw InsufficientData("recover_lengths: degenerate tail (no gaps)");
        std::ostringstream trail;
        trail.precision(12);
        trail << "gaps";
        for (const double g : gaps) trail << ' ' << g;

        // Smallest α ≥ the gap bound whose multiples carry a pair in every window.
        auto has_pair = [&](double centre, double radius) {
            int hits = 0;
            auto it = std::lower_bound(values.begin(), values.end(), centre - radius);
            for (auto i = static_cast<std::size_t>(it - values.begin());
                 i < values.size() && values[i] <= centre + radius; ++i) {
                if (alive[i] && ++hits == 2) return true;
            }
            return false;
        };
        auto comb_holds = [&](double a) {
            const double tau = options.pair_tolerance * a;
            for (const double f : options.window_fractions) {
                const int k_lo = static_cast<int>(std::ceil(f * v_max / a));
                const int k_hi = static_cast<int>(std::floor((v_max - tau) / a));
                const int total = k_hi - k_lo + 1;
                if (total < 10) return false;
                const int allowed = static_cast<int>((1 - options.comb_fraction) * total);
                int misses = 0;
                for (int k = k_lo; k <= k_hi; ++k) {
                    if (!has_pair(k * a, tau) && ++misses > allowed) return false;
                }
            }
            return true;
        };
        const double step = options.pair_tolerance * lower * lower / (2 * v_max);
        double coarse = 0;
        // Pairs spread over ±τ around kα can widen the largest gap beyond α.
        const double start = lower * (1 - 2 * options.pair_tolerance);
        for (double a = start; a <= lower * (1 + options.scan_range); a += step) {
            if (comb_holds(a)) {
                coarse = a;
                break;
            }
        }
        trail << " comb " << coarse;
        out.trail.push_back(trail.str());
        if (coarse == 0) {
            throw InsufficientData("recover_lengths: no length is consistent with the tail (" + trail.str() + ")");
        }

        // Refine α from pair means: mean_k ≈ kα + c_1/k + c_2/k², taking at
        // each k the two alive points nearest the current prediction.
        const double tau = options.pair_tolerance * coarse;
        const double guard = coarse / 10;
        auto alive_within = [&](double centre, double radius) {
            std::vector<std::size_t> idx;
            auto it = std::lower_bound(values.begin(), values.end(), centre - radius);
            for (auto i = static_cast<std::size_t>(it - values.begin());
                 i < values.size() && values[i] <= centre + radius; ++i) {
                if (alive[i]) idx.push_back(i);
            }
            return idx;
        };
        const int k_lo = static_cast<int>(std::ceil(f_min * v_max / coarse));
        const int k_hi = static_cast<int>(std::floor((v_max - tau) / coarse));
        double alpha = coarse, c1 = 0, c2 = 0;
        for (int pass = 0; pass < 4; ++pass) {
            std::vector<double> ks, means;
            for (int k = k_lo; k <= k_hi; ++k) {
                const double predicted = k * alpha + c1 / k + c2 / (double(k) * k);
                auto idx = alive_within(predicted, tau);
                if (idx.size() < 2) continue;
                std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](std::size_t x, std::size_t y) {
                    return std::abs(values[x] - predicted) < std::abs(values[y] - predicted);
                });
                ks.push_back(k);
                means.push_back((values[idx[0]] + values[idx[1]]) / 2);
            }
            for (int trim = 0; trim < 2 && ks.size() >= 6; ++trim) {
                Eigen::MatrixXd A(static_cast<Eigen::Index>(ks.size()), 3);
                Eigen::VectorXd b(static_cast<Eigen::Index>(ks.size()));
                for (std::size_t i = 0; i < ks.size(); ++i) {
                    A(i, 0) = ks[i];
                    A(i, 1) = 1 / ks[i];
                    A(i, 2) = 1 / (ks[i] * ks[i]);
                    b(i) = means[i];
                }
                const Eigen::VectorXd x = A.colPivHouseholderQr().solve(b);
                alpha = x(0);
                c1 = x(1);
                c2 = x(2);
                const Eigen::VectorXd res = (A * x - b).cwiseAbs();
                const double cut = 5 * median(std::vector<double>(res.data(), res.data() + res.size())) + 1e-12;
                std::vector<double> kk, mm;
                for (std::size_t i = 0; i < ks.size(); ++i) {
                    if (res(i) <= cut) {
                        kk.push_back(ks[i]);
                        mm.push_back(means[i]);
                    }
                }
                ks.swap(kk);
                means.swap(mm);
            }
        }
        found.push_back(alpha);

        // Remove the two nearest alive elements around each predicted multiple.
        const int k_start = std::max(1, static_cast<int>(std::floor(0.9 * f_min * v_max / alpha)));
        for (int k = k_start; k * alpha <= v_max + guard; ++k) {
            const double centre = k * alpha + c1 / k + c2 / (double(k) * k);
            auto idx = alive_within(centre, guard);
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                const double da = std::abs(values[a] - centre), db = std::abs(values[b] - centre);
                return da != db ? da < db : values[a] > values[b];
            });
            for (std::size_t r = 0; r < std::min<std::size_t>(2, idx.size()); ++r) alive[idx[r]] = 0;
        }
    }
    out.leftover = static_cast<int>(tail_count());
    if (found.empty()) throw InsufficientData("recover_lengths: no length recovered");

    std::sort(found.begin(), found.end());
    for (const double a : found) {
        if (!out.classes.empty()) {
            LengthClass& last = out.classes.back();
            if (std::abs(a - last.alpha) <= options.grouping_tolerance * last.alpha) {
                last.alpha = (last.alpha * last.multiplicity + a) / (last.multiplicity + 1);
                ++last.multiplicity;
                continue;
            }
        }
        out.classes.push_back({a, 1});
    }
    return out;
}

Relation relate(double alpha_k, double alpha_m, int j_max) {
    const double tol = 1e-5 + 1.0 / std::max(j_max, 1) * 1e-3;
    const double r = alpha_m / alpha_k;
    if (std::abs(r - 1) <= tol) return Relation::Equal;
    if (r > 1) {
        const double n = std::round(r);
        if (n >= 2 && std::abs(r - n) <= tol * n) return Relation::Predecessor;
    } else {
        const double n = std::round(1 / r);
        if (n >= 2 && std::abs(1 / r - n) <= tol * n) return Relation::Successor;
    }
    return Relation::Incomparable;
}

ResonantIndexSet select_resonant_indices(const std::vector<LengthClass>& M, std::size_t m, int Q_max, int j_max) {
    if (m >= M.size()) throw InvalidArgument("select_resonant_indices: class index out of range");
    if (j_max < 1) throw InvalidArgument("select_resonant_indices: j_max must be >= 1");
    const double am = M[m].alpha;
    std::vector<double> blockers;
    double smallest_divisor = am;
    for (std::size_t k = 0; k < M.size(); ++k) {
        if (k == m) continue;
        switch (relate(M[k].alpha, am, j_max)) {
        case Relation::Predecessor:
            smallest_divisor = std::min(smallest_divisor, M[k].alpha);
            break;
        case Relation::Successor:
        case Relation::Incomparable:
            blockers.push_back(M[k].alpha);
            break;
        case Relation::Equal:
            break;
        }
    }
    ResonantIndexSet out;
    double separation = std::numeric_limits<double>::infinity();
    for (const double ak : blockers) {
        for (int n = 1; n * ak <= j_max * am + 1; ++n) separation = std::min(separation, std::abs(am - n * ak));
    }
    out.delta = std::min(separation / 2, 0.45 * smallest_divisor);

    for (const double ak : blockers) {
        // Continued-fraction convergents of α_k/α_m.
        const double ratio = ak / am;
        long long p0 = 1, q0 = 0, p1 = static_cast<long long>(std::floor(ratio)), q1 = 1;
        double x = ratio - std::floor(ratio);
        while (q1 <= Q_max) {
            const double error = std::abs(ratio - double(p1) / double(q1));
            if (q1 >= 2 && error * q1 * j_max * am < out.delta) {
                std::ostringstream os;
                os << "α_k/α_m = " << ratio << " ≈ " << p1 << "/" << q1 << " at horizon " << j_max;
                out.near_resonances.push_back(os.str());
                break;
            }
            if (x < 1e-15) break;
            x = 1 / x;
            const long long a = static_cast<long long>(std::floor(x));
            x -= a;
            const long long p2 = a * p1 + p0, q2 = a * q1 + q0;
            p0 = p1;
            q0 = q1;
            p1 = p2;
            q1 = q2;
        }
    }

    for (int j = 1; j <= j_max; ++j) {
        const double centre = j * am;
        bool free = true;
        for (const double ak : blockers) {
            const double n = std::max(1.0, std::round(centre / ak));
            const double d = std::min(std::abs(centre - n * ak), std::abs(centre - (n + 1) * ak));
            const double d_below = n > 1 ? std::abs(centre - (n - 1) * ak) : d;
            if (std::min(d, d_below) <= out.delta) {
                free = false;
                break;
            }
        }
        if (free) out.indices.push_back(j);
    }
    if (out.indices.empty()) {
        throw InsufficientData("select_resonant_indices: horizon too small; no index up to " + std::to_string(j_max) +
                               " is separated by " + std::to_string(out.delta) + " from competing multiples");
    }
    return out;
}

std::vector<RecoveredComponent> extract_coefficients(const SpectrumSequence& S, const std::vector<LengthClass>& M,
                                                     const ExtractionOptions& options,
                                                     ExtractionDiagnostics* diagnostics) {
    if (options.N < 1) throw InvalidArgument("extract_coefficients: N must be >= 1");
    const Eigen::VectorXd all = S.values();
    const std::vector<double> values(all.data(), all.data() + all.size());
    if (values.empty()) throw InsufficientData("extract_coefficients: empty spectrum");
    const double v_max = values.back();

    std::vector<std::size_t> order(M.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return M[a].alpha < M[b].alpha; });

    std::vector<RecoveredComponent> recovered;
    ExtractionDiagnostics local;
    ExtractionDiagnostics& diag = diagnostics ? *diagnostics : local;
    for (const std::size_t m : order) {
        const double am = M[m].alpha;
        const int mu = M[m].multiplicity;
        const int j_max = static_cast<int>(std::floor(v_max / am)) - 1;
        const ResonantIndexSet E = select_resonant_indices(M, m, options.Q_max, j_max);
        diag.e_sizes.push_back(static_cast<int>(E.indices.size()));
        diag.deltas.push_back(E.delta);
        diag.near_resonances.insert(diag.near_resonances.end(), E.near_resonances.begin(), E.near_resonances.end());

        std::vector<const RecoveredComponent*> predecessors;
        for (const auto& c : recovered) {
            if (relate(c.alpha, am, j_max) == Relation::Predecessor) predecessors.push_back(&c);
        }

        Family root;
        int wrong_count = 0;
        for (const int j : E.indices) {
            const double centre = j * am;
            if (centre + E.delta > v_max) continue;
            auto first = std::lower_bound(values.begin(), values.end(), centre - E.delta);
            auto last = std::upper_bound(values.begin(), values.end(), centre + E.delta);
            std::vector<double> pts(first, last);
            bool ok = true;
            for (const RecoveredComponent* p : predecessors) {
                const int r = static_cast<int>(std::lround(am / p->alpha));
                const double jj = double(r) * j;
                double predicted = jj * p->alpha;
                double inv = 1;
                for (const double s : p->s) {
                    inv /= jj;
                    predicted += s * inv;
                }
                for (int copy = 0; copy < 2 * p->multiplicity; ++copy) {
                    if (pts.empty()) {
                        ok = false;
                        break;
                    }
                    auto nearest = std::min_element(pts.begin(), pts.end(), [&](double a, double b) {
                        return std::abs(a - predicted) < std::abs(b - predicted);
                    });
                    pts.erase(nearest);
                }
            }
            if (!ok || static_cast<int>(pts.size()) != 2 * mu) {
                ++wrong_count;
                continue;
            }
            root.points.emplace(j, std::move(pts));
        }
        diag.used_indices.push_back(static_cast<int>(root.points.size()));
        if (wrong_count > 0) {
            diag.notes.push_back("class α=" + std::to_string(am) + ": " + std::to_string(wrong_count) +
                                 " windows skipped for an unexpected point count");
        }
        if (static_cast<int>(root.points.size()) < options.min_indices) {
            throw InsufficientData("extract_coefficients: class α=" + std::to_string(am) + " has only " +
                                   std::to_string(root.points.size()) + " usable indices; need " +
                                   std::to_string(options.min_indices));
        }

        std::vector<double> gap_log;
        const ClusterContext ctx{am,
                                 options.N,
                                 options.fit_start_fractions,
                                 options.extra_terms,
                                 options.gap_floor,
                                 options.min_indices,
                                 &gap_log};
        std::vector<std::pair<Family, InversePowerFit>> leaves;
        split_family(root, 0, {}, ctx, leaves);
        diag.cluster_gaps.push_back(gap_log);

        std::vector<RecoveredComponent> found;
        for (const auto& [family, fit] : leaves) {
            RecoveredComponent c;
            c.alpha = fit.alpha;
            c.multiplicity = static_cast<int>(family.size() / 2);
            c.merged = c.multiplicity > 1;
            for (int n = 1; n <= options.N; ++n) {
                c.s.push_back(fit.coeffs(n - 1));
                c.uncertainty.push_back(fit.standard_errors(n - 1));
            }
            found.push_back(std::move(c));
        }
        std::sort(found.begin(), found.end(),
                  [](const RecoveredComponent& a, const RecoveredComponent& b) { return a.s < b.s; });
        recovered.insert(recovered.end(), found.begin(), found.end());
    }
    return recovered;
}

DecoupleReport recover_invariants(const std::vector<LengthClass>& M, const std::vector<RecoveredComponent>& components,
                                  const GeometricAssumptions& assumptions, double lambda_tolerance) {
    DecoupleReport report;
    report.M = M;
    report.components = components;
    int ell = 0;
    for (const auto& c : components) {
        report.perimeters.push_back(kTwoPi / c.alpha);
        ell += c.multiplicity;
    }
    if (!assumptions.constant_potential || components.empty()) return report;

    bool any_nonzero = false;
    for (const auto& c : components) {
        if (c.s.empty()) continue;
        const double u = c.uncertainty.empty() ? 0 : c.uncertainty[0];
        if (std::abs(c.s[0]) > std::max(1e-6, 5 * u)) any_nonzero = true;
    }
    if (!any_nonzero) {
        report.nothing_beyond_perimeters = true;
        return report;
    }
    if (std::any_of(components.begin(), components.end(), [](const auto& c) { return c.s.size() < 2; })) {
        throw InvalidArgument("recover_invariants: need s_1 and s_2 for every component");
    }
    double weighted = 0;
    for (const auto& c : components) {
        const double lambda = -2 * c.alpha * c.s[0];
        report.component_lambdas.push_back(lambda);
        weighted += lambda * c.multiplicity;
    }
    const double lambda = weighted / ell;
    report.lambda = lambda;
    for (const double l : report.component_lambdas) {
        report.lambda_residual = std::max(report.lambda_residual, std::abs(l - lambda));
    }
    report.lambda_consistent = report.lambda_residual <= lambda_tolerance * std::abs(lambda);

    double total = 0;
    for (const auto& c : components) {
        const double kg = 4 * std::numbers::pi * c.s[1] * c.alpha / lambda;
        report.geodesic_totals.push_back(kg);
        total += kg * c.multiplicity;
    }
    report.euler_invariant = kTwoPi * (2 - ell) - total;
    report.gauss_bonnet_residual = total + *report.euler_invariant - kTwoPi * (2 - ell);
    if (!(std::abs(report.gauss_bonnet_residual) <= 1e-9 * (kTwoPi * ell + std::abs(total)))) {
        throw NumericalError("recover_invariants: Gauss-Bonnet residual " +
                             std::to_string(report.gauss_bonnet_residual));
    }
    if (assumptions.spherical) report.sphere_area = report.euler_invariant;
    if (assumptions.flat) report.flat_genus = *report.euler_invariant / (4 * std::numbers::pi);
    return report;
}

DecoupleReport decouple(const SpectrumSequence& S, const DecoupleOptions& options) {
    LengthRecovery lengths = recover_lengths(S, options.lengths);
    ExtractionDiagnostics diagnostics;
    const auto components = extract_coefficients(S, lengths.classes, options.extraction, &diagnostics);
    DecoupleReport report = recover_invariants(lengths.classes, components, options.assumptions,
                                               options.lambda_tolerance);
    report.lengths = std::move(lengths);
    report.diagnostics = std::move(diagnostics);

    // Index-by-index comparison with the recovered model over the middle of the data.
    const double v_max = S[S.size() - 1].value;
    std::vector<SpectrumSequence> models;
    for (std::size_t i = 0; i < components.size(); ++i) {
        const auto& c = components[i];
        const int j_max = static_cast<int>(std::ceil(v_max / c.alpha)) + 2;
        models.push_back(build_model_sequence({c.alpha, c.s, c.multiplicity}, static_cast<int>(c.s.size()), j_max,
                                              static_cast<int>(i)));
    }
    const SpectrumSequence model = merge(models);
    if (model.size() >= S.size()) {
        double worst = 0;
        const auto lo = static_cast<std::size_t>(0.10 * static_cast<double>(S.size()));
        const auto hi = static_cast<std::size_t>(0.95 * static_cast<double>(S.size()));
        for (std::size_t i = lo; i < hi; ++i) worst = std::max(worst, std::abs(S[i].value - model[i].value));
        report.model_mismatch = worst;
    }
    return report;
}

std::string summary_text(const DecoupleReport& report) {
    std::ostringstream os;
    os.precision(10);
    os << "boundary components: " << report.components.size() << "\n";
    for (std::size_t i = 0; i < report.components.size(); ++i) {
        const auto& c = report.components[i];
        os << "  [" << i << "] alpha=" << c.alpha << " perimeter=" << report.perimeters[i]
           << " multiplicity=" << c.multiplicity << (c.merged ? " (merged)" : "") << "\n";
        for (std::size_t n = 0; n < c.s.size(); ++n) {
            os << "      s_" << n + 1 << " = " << c.s[n] << " +/- " << c.uncertainty[n] << "\n";
        }
        if (i < report.geodesic_totals.size()) os << "      geodesic total = " << report.geodesic_totals[i] << "\n";
    }
    if (report.nothing_beyond_perimeters) {
        os << "lambda = 0: nothing beyond perimeters is recoverable\n";
    }
    if (report.lambda) {
        os << "lambda = " << *report.lambda << " (residual " << report.lambda_residual
           << (report.lambda_consistent ? ", consistent" : ", INCONSISTENT") << ")\n";
    }
    if (report.euler_invariant) os << "4*pi*genus + integral of K = " << *report.euler_invariant << "\n";
    if (report.sphere_area) os << "area (spherical) = " << *report.sphere_area << "\n";
    if (report.flat_genus) os << "genus (flat) = " << *report.flat_genus << "\n";
    if (report.model_mismatch) os << "model mismatch = " << *report.model_mismatch << "\n";
    return os.str();
}

} // namespace dtn

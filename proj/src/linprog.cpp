#include "hca/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <set>

#include "hca/errors.hpp"

namespace hca {

void LinearProgram::validate() const {
    const std::size_t k = w.size();
    if (k == 0) throw ConfigError("lp: empty cost vector");
    for (double v : w)
        if (!std::isfinite(v)) throw ConfigError("lp: non-finite cost entry");
    if (a_ub.size() != b_ub.size())
        throw ConfigError("lp: a_ub/b_ub row count mismatch");
    if (a_eq.size() != b_eq.size())
        throw ConfigError("lp: a_eq/b_eq row count mismatch");
    for (const auto& row : a_ub)
        if (row.size() != k) throw ConfigError("lp: a_ub row width != num_vars");
    for (const auto& row : a_eq)
        if (row.size() != k) throw ConfigError("lp: a_eq row width != num_vars");
    for (double v : b_ub)
        if (!std::isfinite(v)) throw ConfigError("lp: non-finite b_ub entry");
    for (double v : b_eq)
        if (!std::isfinite(v)) throw ConfigError("lp: non-finite b_eq entry");
    if (!bounds.empty() && bounds.size() != k)
        throw ConfigError("lp: bounds size != num_vars");
    for (const auto& b : bounds) {
        if (std::isnan(b.lower) || std::isnan(b.upper) || b.lower > b.upper)
            throw ConfigError("lp: invalid variable bound");
    }
    if (!labels.empty() && labels.size() != k)
        throw ConfigError("lp: labels size != num_vars");
}

namespace {

constexpr double kPivotEps = 1e-9;
constexpr double kDegenerateStep = 1e-10;
constexpr int kStallLimit = 200;

// How each original variable maps onto engine columns.
struct VarMap {
    enum Kind { Shift, Mirror, Split } kind = Shift;
    int col = -1;
    int col_neg = -1;   // Split only
    double offset = 0;  // Shift: lower bound; Mirror: upper bound
};

enum class ColState : std::uint8_t { Lower, Upper, Basic };

// Two-phase primal simplex over the bounded standard form
//   min c'y  s.t.  A y = b,  0 <= y <= u.
// The tableau T always holds B^-1 A; `value` holds the basic solution given
// the nonbasic bound states. Copyable so the alternate-optima search can
// branch from an optimal basis.
class Engine {
public:
    explicit Engine(const LinearProgram& lp) : lp_(&lp) { build(); }

    SolveStatus run() {
        if (!phase_one()) return SolveStatus::Infeasible;
        const SolveStatus st = phase_two();
        if (st == SolveStatus::Optimal) refine_values();
        return st;
    }

    std::vector<double> extract_x() const {
        std::vector<double> x(lp_->num_vars(), 0.0);
        for (std::size_t j = 0; j < x.size(); ++j) {
            const VarMap& m = vmap_[j];
            switch (m.kind) {
            case VarMap::Shift: x[j] = m.offset + col_value(m.col); break;
            case VarMap::Mirror: x[j] = m.offset - col_value(m.col); break;
            case VarMap::Split: x[j] = col_value(m.col) - col_value(m.col_neg); break;
            }
        }
        return x;
    }

    std::vector<double> reduced_costs_original() const {
        std::vector<double> rc(lp_->num_vars(), 0.0);
        for (std::size_t j = 0; j < rc.size(); ++j) {
            const VarMap& m = vmap_[j];
            rc[j] = (m.kind == VarMap::Mirror) ? -z_[m.col] : z_[m.col];
        }
        return rc;
    }

    std::vector<int> basic_original_vars() const {
        std::vector<int> out;
        for (std::size_t j = 0; j < lp_->num_vars(); ++j) {
            const VarMap& m = vmap_[j];
            const bool basic = state_[m.col] == ColState::Basic ||
                               (m.kind == VarMap::Split && state_[m.col_neg] == ColState::Basic);
            if (basic) out.push_back(static_cast<int>(j));
        }
        return out;
    }

    // Nonbasic columns whose reduced cost vanishes at the current optimum;
    // pivoting one in moves along the optimal face.
    std::vector<int> zero_rc_moves() const {
        std::vector<int> cols;
        for (int c = 0; c < ncols_; ++c) {
            if (locked_[c] || state_[c] == ColState::Basic) continue;
            if (ub_[c] <= kDegenerateStep) continue;
            if (std::abs(z_[c]) <= kOptTol) cols.push_back(c);
        }
        return cols;
    }

    // One pivot (or bound flip) bringing `col` in. Returns false when the move
    // is an unbounded ray.
    bool move_col(int col) {
        const int dir = state_[col] == ColState::Lower ? 1 : -1;
        double t;
        int leave;
        if (!ratio_test(col, dir, t, leave)) return false;
        apply_step(col, dir, t, leave);
        return true;
    }

private:
    const LinearProgram* lp_;
    int nrows_ = 0;
    int ncols_ = 0;       // structural + slack + artificial
    int n_real_ = 0;      // structural + slack (artificials come after)
    std::vector<VarMap> vmap_;
    std::vector<std::vector<double>> tab_;  // nrows x ncols
    std::vector<double> value_;             // basic values per row
    std::vector<double> z_;                 // reduced-cost row
    std::vector<double> cost_;              // phase-2 cost per column
    std::vector<double> ub_;                // per-column upper bound (lower is 0)
    std::vector<ColState> state_;
    std::vector<bool> locked_;
    std::vector<int> basis_;                // per row
    std::vector<std::vector<double>> a0_;   // pristine rows for final refinement
    std::vector<double> b0_;
    double obj_ = 0.0;
    bool bland_ = false;
    double obj_at_switch_ = 0.0;
    int stall_ = 0;

    double col_value(int c) const {
        switch (state_[c]) {
        case ColState::Lower: return 0.0;
        case ColState::Upper: return ub_[c];
        case ColState::Basic:
            for (int r = 0; r < nrows_; ++r)
                if (basis_[r] == c) return value_[r];
            return 0.0;
        }
        return 0.0;
    }

    void build() {
        const std::size_t k = lp_->num_vars();
        const std::size_t m_eq = lp_->a_eq.size();
        const std::size_t m_ub = lp_->a_ub.size();
        nrows_ = static_cast<int>(m_eq + m_ub);

        vmap_.resize(k);
        int next = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const Bound b = lp_->bound(j);
            VarMap& m = vmap_[j];
            if (b.lower == -kInfinity && b.upper == kInfinity) {
                m.kind = VarMap::Split;
                m.col = next++;
                m.col_neg = next++;
            } else if (b.lower == -kInfinity) {
                m.kind = VarMap::Mirror;
                m.col = next++;
                m.offset = b.upper;
            } else {
                m.kind = VarMap::Shift;
                m.col = next++;
                m.offset = b.lower;
            }
        }
        const int n_struct = next;
        n_real_ = n_struct + static_cast<int>(m_ub);  // one slack per ineq row
        ncols_ = n_real_;                              // artificials appended below

        const double sgn = lp_->sense == Sense::Maximize ? -1.0 : 1.0;
        cost_.assign(n_real_, 0.0);
        ub_.assign(n_real_, kInfinity);
        for (std::size_t j = 0; j < k; ++j) {
            const Bound b = lp_->bound(j);
            const VarMap& m = vmap_[j];
            const double c = sgn * lp_->w[j];
            switch (m.kind) {
            case VarMap::Shift:
                cost_[m.col] = c;
                if (b.upper < kInfinity) ub_[m.col] = b.upper - b.lower;
                break;
            case VarMap::Mirror:
                cost_[m.col] = -c;
                break;
            case VarMap::Split:
                cost_[m.col] = c;
                cost_[m.col_neg] = -c;
                break;
            }
        }

        tab_.assign(nrows_, std::vector<double>(ncols_, 0.0));
        value_.assign(nrows_, 0.0);
        std::vector<double> rhs(nrows_, 0.0);
        auto fill_row = [&](int r, const std::vector<double>& a, double b) {
            double adj = b;
            for (std::size_t j = 0; j < k; ++j) {
                const double aj = a[j];
                if (aj == 0.0) continue;
                const VarMap& m = vmap_[j];
                switch (m.kind) {
                case VarMap::Shift:
                    tab_[r][m.col] += aj;
                    adj -= aj * m.offset;
                    break;
                case VarMap::Mirror:
                    tab_[r][m.col] -= aj;
                    adj -= aj * m.offset;
                    break;
                case VarMap::Split:
                    tab_[r][m.col] += aj;
                    tab_[r][m.col_neg] -= aj;
                    break;
                }
            }
            rhs[r] = adj;
        };
        for (std::size_t i = 0; i < m_eq; ++i)
            fill_row(static_cast<int>(i), lp_->a_eq[i], lp_->b_eq[i]);
        for (std::size_t i = 0; i < m_ub; ++i) {
            const int r = static_cast<int>(m_eq + i);
            fill_row(r, lp_->a_ub[i], lp_->b_ub[i]);
            tab_[r][n_struct + static_cast<int>(i)] = 1.0;  // slack
        }

        // Normalize to rhs >= 0, then pick the starting basis: a +1 slack
        // where available, an artificial otherwise.
        state_.assign(ncols_, ColState::Lower);
        basis_.assign(nrows_, -1);
        for (int r = 0; r < nrows_; ++r) {
            if (rhs[r] < 0.0) {
                rhs[r] = -rhs[r];
                for (double& v : tab_[r]) v = -v;
            }
        }
        for (int r = 0; r < nrows_; ++r) {
            const int slack = (r >= static_cast<int>(m_eq))
                                  ? n_struct + (r - static_cast<int>(m_eq))
                                  : -1;
            if (slack >= 0 && tab_[r][slack] > 0.5) {
                basis_[r] = slack;
            } else {
                const int art = ncols_++;
                for (auto& row : tab_) row.push_back(0.0);
                tab_[r][art] = 1.0;
                cost_.push_back(0.0);
                ub_.push_back(kInfinity);
                state_.push_back(ColState::Lower);
                basis_[r] = art;
            }
            state_[basis_[r]] = ColState::Basic;
            value_[r] = rhs[r];
        }
        locked_.assign(ncols_, false);
        for (int c = 0; c < ncols_; ++c)
            if (ub_[c] <= 0.0) locked_[c] = true;  // fixed at its bound

        a0_ = tab_;
        b0_ = rhs;
    }

    void recompute_z(const std::vector<double>& cost) {
        z_ = cost;
        obj_ = 0.0;
        for (int r = 0; r < nrows_; ++r) {
            const double cb = cost[basis_[r]];
            obj_ += cb * value_[r];
            if (cb == 0.0) continue;
            const auto& row = tab_[r];
            for (int c = 0; c < ncols_; ++c) z_[c] -= cb * row[c];
        }
        for (int c = 0; c < ncols_; ++c)
            if (state_[c] == ColState::Upper) obj_ += cost[c] * ub_[c];
    }

    int choose_entering() const {
        int best = -1;
        double best_viol = kOptTol;
        for (int c = 0; c < ncols_; ++c) {
            if (locked_[c] || state_[c] == ColState::Basic) continue;
            const double viol = state_[c] == ColState::Lower ? -z_[c] : z_[c];
            if (viol <= kOptTol) continue;
            if (bland_) return c;
            if (viol > best_viol) {
                best_viol = viol;
                best = c;
            }
        }
        return best;
    }

    // Maximum step for `col` moving in `dir`; leave = pivot row or -1 for a
    // bound flip. Returns false on an unbounded ray.
    bool ratio_test(int col, int dir, double& t, int& leave) const {
        double best_t = kInfinity;
        int best_row = -1;
        int best_var = -1;
        for (int r = 0; r < nrows_; ++r) {
            const double a = tab_[r][col] * dir;
            double cand;
            if (a > kPivotEps) {
                cand = value_[r] / a;
            } else if (a < -kPivotEps && ub_[basis_[r]] < kInfinity) {
                cand = (ub_[basis_[r]] - value_[r]) / (-a);
            } else {
                continue;
            }
            if (cand < 0.0) cand = 0.0;
            if (cand < best_t - 1e-12 ||
                (cand < best_t + 1e-12 && best_row >= 0 && basis_[r] < best_var)) {
                best_t = cand;
                best_row = r;
                best_var = basis_[r];
            }
        }
        if (ub_[col] < best_t - 1e-12) {
            t = ub_[col];
            leave = -1;
            return true;
        }
        if (best_row < 0) return false;
        t = best_t;
        leave = best_row;
        return true;
    }

    void apply_step(int col, int dir, double t, int leave) {
        const double delta = dir * t;
        obj_ += z_[col] * delta;
        if (leave < 0) {
            if (delta != 0.0)
                for (int r = 0; r < nrows_; ++r) value_[r] -= tab_[r][col] * delta;
            state_[col] = state_[col] == ColState::Lower ? ColState::Upper : ColState::Lower;
            return;
        }
        const int leaving = basis_[leave];
        const double a_eff = tab_[leave][col] * dir;
        if (delta != 0.0)
            for (int r = 0; r < nrows_; ++r)
                if (r != leave) value_[r] -= tab_[r][col] * delta;
        state_[leaving] = a_eff > 0.0 ? ColState::Lower : ColState::Upper;
        value_[leave] = (state_[col] == ColState::Lower ? 0.0 : ub_[col]) + delta;
        state_[col] = ColState::Basic;
        basis_[leave] = col;

        auto& prow = tab_[leave];
        const double piv = prow[col];
        for (double& v : prow) v /= piv;
        prow[col] = 1.0;
        for (int r = 0; r < nrows_; ++r) {
            if (r == leave) continue;
            const double f = tab_[r][col];
            if (f == 0.0) continue;
            auto& row = tab_[r];
            for (int c = 0; c < ncols_; ++c) row[c] -= f * prow[c];
            row[col] = 0.0;
        }
        const double zf = z_[col];
        if (zf != 0.0) {
            for (int c = 0; c < ncols_; ++c) z_[c] -= zf * prow[c];
            z_[col] = 0.0;
        }
    }

    void note_step_size(double t) {
        if (t <= kDegenerateStep) {
            if (++stall_ > kStallLimit && !bland_) {
                bland_ = true;
                obj_at_switch_ = obj_;
            }
        } else {
            stall_ = 0;
            if (bland_ && obj_ < obj_at_switch_ - 1e-12) bland_ = false;
        }
    }

    // True on continue, false when no entering column remains.
    bool iterate(bool phase1, bool& unbounded) {
        const int col = choose_entering();
        if (col < 0) return false;
        const int dir = state_[col] == ColState::Lower ? 1 : -1;
        double t;
        int leave;
        if (!ratio_test(col, dir, t, leave)) {
            if (phase1) throw SolverError("simplex: unbounded phase-1 step");
            unbounded = true;
            return false;
        }
        apply_step(col, dir, t, leave);
        note_step_size(t);
        return true;
    }

    std::size_t max_iters() const {
        return 2000 + 200 * static_cast<std::size_t>(nrows_) +
               20 * static_cast<std::size_t>(ncols_);
    }

    bool phase_one() {
        std::vector<double> art_cost(ncols_, 0.0);
        bool any_art = false;
        for (int c = n_real_; c < ncols_; ++c) {
            art_cost[c] = 1.0;
            any_art = true;
        }
        if (any_art) {
            recompute_z(art_cost);
            bland_ = false;
            stall_ = 0;
            bool unbounded = false;
            std::size_t iters = 0;
            while (iterate(true, unbounded))
                if (++iters > max_iters())
                    throw SolverError("simplex: phase-1 iteration limit");
            double b_scale = 1.0;
            for (double b : b0_) b_scale = std::max(b_scale, std::abs(b));
            if (obj_ > kFeasTol * b_scale * 10.0) return false;
            drop_artificials();
        }
        return true;
    }

    void drop_artificials() {
        for (int r = 0; r < nrows_; ++r) {
            if (basis_[r] < n_real_) continue;
            int piv_col = -1;
            for (int c = 0; c < n_real_; ++c) {
                if (locked_[c] || state_[c] == ColState::Basic) continue;
                if (std::abs(tab_[r][c]) > 1e-7) {
                    piv_col = c;
                    break;
                }
            }
            if (piv_col >= 0) {
                // Degenerate pivot: the artificial sits at ~0, so the entering
                // displacement is ~0 and feasibility is preserved.
                const double delta = value_[r] / tab_[r][piv_col];
                for (int rr = 0; rr < nrows_; ++rr)
                    if (rr != r) value_[rr] -= tab_[rr][piv_col] * delta;
                state_[basis_[r]] = ColState::Lower;
                value_[r] = (state_[piv_col] == ColState::Lower ? 0.0 : ub_[piv_col]) + delta;
                state_[piv_col] = ColState::Basic;
                basis_[r] = piv_col;
                auto& prow = tab_[r];
                const double piv = prow[piv_col];
                for (double& v : prow) v /= piv;
                prow[piv_col] = 1.0;
                for (int rr = 0; rr < nrows_; ++rr) {
                    if (rr == r) continue;
                    const double f = tab_[rr][piv_col];
                    if (f == 0.0) continue;
                    for (int c = 0; c < ncols_; ++c) tab_[rr][c] -= f * prow[c];
                    tab_[rr][piv_col] = 0.0;
                }
            } else {
                // The row is a linear combination of the others: remove it.
                tab_.erase(tab_.begin() + r);
                a0_.erase(a0_.begin() + r);
                b0_.erase(b0_.begin() + r);
                value_.erase(value_.begin() + r);
                state_[basis_[r]] = ColState::Lower;
                basis_.erase(basis_.begin() + r);
                --nrows_;
                --r;
            }
        }
        for (int c = n_real_; c < ncols_; ++c) locked_[c] = true;
    }

    SolveStatus phase_two() {
        recompute_z(cost_);
        bland_ = false;
        stall_ = 0;
        bool unbounded = false;
        std::size_t iters = 0;
        while (iterate(false, unbounded))
            if (++iters > max_iters())
                throw SolverError("simplex: phase-2 iteration limit");
        return unbounded ? SolveStatus::Unbounded : SolveStatus::Optimal;
    }

    // Re-solve B x_B = b - N x_N from the pristine matrix to shed the
    // round-off the pivot sequence accumulated.
    void refine_values() {
        const int m = nrows_;
        if (m == 0) return;
        std::vector<double> rhs(b0_);
        for (int c = 0; c < ncols_; ++c) {
            if (state_[c] != ColState::Upper) continue;
            for (int r = 0; r < m; ++r) rhs[r] -= a0_[r][c] * ub_[c];
        }
        std::vector<std::vector<double>> lu(m, std::vector<double>(m));
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) lu[r][c] = a0_[r][basis_[c]];
        std::vector<int> perm(m);
        for (int i = 0; i < m; ++i) perm[i] = i;
        for (int c = 0; c < m; ++c) {
            int p = c;
            for (int r = c + 1; r < m; ++r)
                if (std::abs(lu[r][c]) > std::abs(lu[p][c])) p = r;
            if (std::abs(lu[p][c]) < 1e-12) return;  // keep tableau values
            if (p != c) {
                std::swap(lu[p], lu[c]);
                std::swap(perm[p], perm[c]);
            }
            for (int r = c + 1; r < m; ++r) {
                const double f = lu[r][c] / lu[c][c];
                lu[r][c] = f;
                for (int cc = c + 1; cc < m; ++cc) lu[r][cc] -= f * lu[c][cc];
            }
        }
        std::vector<double> y(m);
        for (int r = 0; r < m; ++r) {
            double s = rhs[perm[r]];
            for (int c = 0; c < r; ++c) s -= lu[r][c] * y[c];
            y[r] = s;
        }
        std::vector<double> xb(m);
        for (int r = m - 1; r >= 0; --r) {
            double s = y[r];
            for (int c = r + 1; c < m; ++c) s -= lu[r][c] * xb[c];
            xb[r] = s / lu[r][r];
        }
        for (int r = 0; r < m; ++r) {
            const double ub = ub_[basis_[r]];
            if (xb[r] < -1e-6 || xb[r] > ub + 1e-6) return;  // distrust, keep tableau
        }
        for (int r = 0; r < m; ++r) value_[r] = xb[r];
    }
};

double objective_of(const LinearProgram& lp, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += lp.w[j] * x[j];
    return s;
}

Solution make_solution(const LinearProgram& lp, const Engine& eng, SolveStatus st) {
    Solution sol;
    sol.status = st;
    if (st != SolveStatus::Optimal) return sol;
    sol.x = eng.extract_x();
    sol.objective = objective_of(lp, sol.x);
    sol.reduced_costs = eng.reduced_costs_original();
    sol.basis = eng.basic_original_vars();
    return sol;
}

std::vector<long long> code_key(const std::vector<double>& x) {
    std::vector<long long> key(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) key[i] = std::llround(x[i] * 1e7);
    return key;
}

} // namespace

Solution solve(const LinearProgram& lp) {
    lp.validate();
    Engine eng(lp);
    const SolveStatus st = eng.run();
    return make_solution(lp, eng, st);
}

std::vector<Solution> enumerate_alternate_optima(const LinearProgram& lp,
                                                 const Solution& sol,
                                                 std::size_t limit) {
    lp.validate();
    if (sol.status != SolveStatus::Optimal)
        throw PreconditionError("enumerate_alternate_optima: solution not optimal");
    if (limit == 0) return {};

    Engine root(lp);
    if (root.run() != SolveStatus::Optimal)
        throw PreconditionError("enumerate_alternate_optima: lp no longer solves");

    std::vector<Solution> found;
    std::set<std::vector<long long>> seen;
    std::deque<Engine> frontier;
    found.push_back(make_solution(lp, root, SolveStatus::Optimal));
    seen.insert(code_key(found.back().x));
    frontier.push_back(root);

    std::size_t budget = std::max<std::size_t>(1000, 64 * limit);
    while (!frontier.empty() && found.size() < limit && budget > 0) {
        Engine eng = std::move(frontier.front());
        frontier.pop_front();
        for (int col : eng.zero_rc_moves()) {
            if (found.size() >= limit || budget == 0) break;
            --budget;
            Engine next = eng;
            if (!next.move_col(col)) continue;  // optimal ray, not a vertex
            Solution s = make_solution(lp, next, SolveStatus::Optimal);
            if (seen.insert(code_key(s.x)).second) {
                found.push_back(std::move(s));
                frontier.push_back(std::move(next));
            }
        }
    }
    return found;
}

std::vector<double> round_binary(const std::vector<double>& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = std::round(x[i]);
        if ((r != 0.0 && r != 1.0) || std::abs(x[i] - r) > kIntegralityTol)
            throw DegenerateSolutionError("entry " + std::to_string(i) +
                                          " is not a 0/1 code value");
        out[i] = r;
    }
    return out;
}

std::size_t shd(const std::vector<double>& x1, const std::vector<double>& x2) {
    if (x1.size() != x2.size()) throw ConfigError("shd: length mismatch");
    const std::vector<double> a = round_binary(x1);
    const std::vector<double> b = round_binary(x2);
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) ++d;
    return d;
}

double feasibility_residual(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (std::size_t r = 0; r < lp.a_eq.size(); ++r) {
        double s = -lp.b_eq[r];
        for (std::size_t j = 0; j < x.size(); ++j) s += lp.a_eq[r][j] * x[j];
        worst = std::max(worst, std::abs(s));
    }
    for (std::size_t r = 0; r < lp.a_ub.size(); ++r) {
        double s = -lp.b_ub[r];
        for (std::size_t j = 0; j < x.size(); ++j) s += lp.a_ub[r][j] * x[j];
        worst = std::max(worst, s);
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        const Bound b = lp.bound(j);
        worst = std::max(worst, b.lower - x[j]);
        worst = std::max(worst, x[j] - b.upper);
    }
    return std::max(worst, 0.0);
}

} // namespace hca

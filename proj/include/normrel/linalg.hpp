#pragma once

// Exact integer linear algebra on dense row vectors: an incremental
// Hermite-form lattice builder (optionally tracking, for every basis row, an
// integer combination of the inserted generators), Smith normal form, and
// plain Gaussian elimination over a prime field.
//
// The builder is the workhorse for every ideal/lattice question in this
// library: rank over Q, lattice membership with certificate, the intersection
// with a coordinate line (the optimal-denominator computation), lattice
// determinants and integer kernels.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "normrel/common.hpp"
#include "normrel/numbertheory.hpp"

namespace normrel {

using ZVec = std::vector<mpz_class>;
using ZMat = std::vector<ZVec>;
using Combo = std::map<std::size_t, mpz_class>;  // input index -> coefficient

namespace detail {

inline void combo_sub_mul(Combo& dst, const mpz_class& q, const Combo& src) {
    if (q == 0) return;
    for (const auto& [k, c] : src) {
        mpz_class& slot = dst[k];
        slot -= q * c;
        if (slot == 0) dst.erase(k);
    }
}

inline Combo combo_linear(const mpz_class& a, const Combo& x, const mpz_class& b, const Combo& y) {
    Combo out;
    for (const auto& [k, c] : x) {
        mpz_class v = a * c;
        if (v != 0) out[k] = v;
    }
    for (const auto& [k, c] : y) {
        mpz_class& slot = out[k];
        slot += b * c;
        if (slot == 0) out.erase(k);
    }
    return out;
}

}  // namespace detail

class LatticeBuilder {
public:
    // `col_order` is the column processing order; defaults to 0..n-1. A row's
    // pivot is its first nonzero column in that order, so a row whose pivot
    // sits at the last processed column is supported on that column alone.
    explicit LatticeBuilder(std::size_t n, std::vector<int> col_order = {}, bool track = false)
        : n_(n), order_(std::move(col_order)), track_(track) {
        if (order_.empty()) {
            order_.resize(n_);
            for (std::size_t i = 0; i < n_; ++i) order_[i] = static_cast<int>(i);
        }
        pos_of_row_.assign(n_, -1);
    }

    std::size_t dim() const { return n_; }
    std::size_t rank() const { return rows_.size(); }
    std::size_t inserted() const { return n_inputs_; }

    // Inserts one generator. Returns true if the lattice grew (a new pivot
    // appeared or an existing pivot shrank).
    bool insert(ZVec v) {
        Combo combo;
        if (track_) combo[n_inputs_] = 1;
        ++n_inputs_;
        bool changed = false;
        reduce_in(std::move(v), std::move(combo), nullptr, &changed);
        return changed;
    }

    // Reduces v against the current basis. Returns the remainder; if `combo`
    // is non-null and the remainder is zero, writes the representation of v
    // as a combination of the inserted generators (requires tracking).
    ZVec reduce(ZVec v, Combo* combo = nullptr) const {
        Combo acc;
        for (std::size_t pos = 0; pos < n_; ++pos) {
            int r = pos_of_row_[pos];
            if (r < 0) continue;
            int c = order_[pos];
            if (v[c] == 0) continue;
            mpz_class q = fdiv_q(v[c], rows_[r].vec[c]);
            if (q == 0) continue;
            row_sub_mul(v, q, rows_[r].vec);
            if (combo) detail::combo_sub_mul(acc, -q, rows_[r].combo);
        }
        if (combo) *combo = std::move(acc);
        return v;
    }

    // Coefficients of v over the echelon basis rows (ordered by pivot), or
    // absent if v is not in the lattice.
    std::optional<ZVec> coordinates(const ZVec& v) const {
        ZVec w = v;
        std::vector<std::pair<std::size_t, mpz_class>> coeffs;
        std::size_t basis_index = 0;
        for (std::size_t pos = 0; pos < n_; ++pos) {
            int r = pos_of_row_[pos];
            if (r < 0) continue;
            int c = order_[pos];
            std::size_t this_index = basis_index++;
            if (w[c] == 0) continue;
            mpz_class q = w[c] / rows_[r].vec[c];
            if (q * rows_[r].vec[c] != w[c]) return std::nullopt;
            row_sub_mul(w, q, rows_[r].vec);
            coeffs.emplace_back(this_index, q);
        }
        for (const auto& x : w)
            if (x != 0) return std::nullopt;
        ZVec out(rank(), 0);
        for (auto& [i, q] : coeffs) out[i] = q;
        return out;
    }

    // Membership with certificate: if v lies in the lattice, returns the
    // combination of inserted generators equal to v.
    std::optional<Combo> represent(const ZVec& v) const {
        ZVec w = v;
        Combo acc;
        for (std::size_t pos = 0; pos < n_; ++pos) {
            int c = order_[pos];
            if (w[c] == 0) continue;
            int r = pos_of_row_[pos];
            if (r < 0) return std::nullopt;
            mpz_class q = w[c] / rows_[r].vec[c];
            if (q * rows_[r].vec[c] != w[c]) return std::nullopt;
            row_sub_mul(w, q, rows_[r].vec);
            if (track_) detail::combo_sub_mul(acc, -q, rows_[r].combo);
        }
        for (const auto& x : w)
            if (x != 0) return std::nullopt;
        return acc;
    }

    bool contains(const ZVec& v) const {
        ZVec w = v;
        for (std::size_t pos = 0; pos < n_; ++pos) {
            int c = order_[pos];
            if (w[c] == 0) continue;
            int r = pos_of_row_[pos];
            if (r < 0) return false;
            mpz_class q = w[c] / rows_[r].vec[c];
            if (q * rows_[r].vec[c] != w[c]) return false;
            row_sub_mul(w, q, rows_[r].vec);
        }
        for (const auto& x : w)
            if (x != 0) return false;
        return true;
    }

    // Pivot entry at the column processed last (0 when absent). With the
    // identity coordinate ordered last this is the positive generator of the
    // intersection of the lattice with that coordinate line.
    mpz_class last_line_pivot() const {
        int r = pos_of_row_[n_ - 1];
        if (r < 0) return 0;
        return rows_[r].vec[order_[n_ - 1]];
    }

    Combo last_line_combo() const {
        int r = pos_of_row_[n_ - 1];
        if (r < 0) return {};
        return rows_[r].combo;
    }

    // Lattice index in Z^n: product of the pivots, or 0 if not full rank.
    mpz_class index_in_ambient() const {
        if (rank() != n_) return 0;
        mpz_class d = 1;
        for (std::size_t pos = 0; pos < n_; ++pos) d *= rows_[pos_of_row_[pos]].vec[order_[pos]];
        return d;
    }

    // Basis rows ordered by pivot position (Hermite echelon form).
    ZMat basis() const {
        ZMat out;
        for (std::size_t pos = 0; pos < n_; ++pos)
            if (pos_of_row_[pos] >= 0) out.push_back(rows_[pos_of_row_[pos]].vec);
        return out;
    }

    Combo combo_of_basis_row(std::size_t i) const {
        std::size_t seen = 0;
        for (std::size_t pos = 0; pos < n_; ++pos)
            if (pos_of_row_[pos] >= 0 && seen++ == i) return rows_[pos_of_row_[pos]].combo;
        return {};
    }

    // Inserts a vector; when it is linearly dependent on the earlier inputs
    // the returned combination is a kernel relation among them (requires
    // tracking).
    std::optional<Combo> insert_with_kernel(ZVec v) {
        Combo combo;
        if (track_) combo[n_inputs_] = 1;
        ++n_inputs_;
        Combo out;
        bool new_row = reduce_in(std::move(v), std::move(combo), track_ ? &out : nullptr, nullptr);
        if (!new_row && track_) return out;
        return std::nullopt;
    }

private:
    struct Row {
        ZVec vec;
        Combo combo;
    };

    static mpz_class fdiv_q(const mpz_class& a, const mpz_class& b) {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        return q;
    }

    static void row_sub_mul(ZVec& dst, const mpz_class& q, const ZVec& src) {
        for (std::size_t i = 0; i < dst.size(); ++i)
            if (src[i] != 0) dst[i] -= q * src[i];
    }

    // Returns true iff a new row was inserted; *changed_out additionally
    // reports pivot shrinkage from gcd merges.
    bool reduce_in(ZVec v, Combo combo, Combo* kernel_out, bool* changed_out) {
        for (std::size_t pos = 0; pos < n_; ++pos) {
            int c = order_[pos];
            if (v[c] == 0) continue;
            int r = pos_of_row_[pos];
            if (r < 0) {
                if (sgn(v[c]) < 0) {
                    for (auto& x : v) x = -x;
                    negate(combo);
                }
                pos_of_row_[pos] = static_cast<int>(rows_.size());
                rows_.push_back(Row{std::move(v), std::move(combo)});
                reduce_column(pos);
                if (changed_out) *changed_out = true;
                return true;
            }
            Row& row = rows_[r];
            const mpz_class& a = row.vec[c];
            if (v[c] % a == 0) {
                mpz_class q = v[c] / a;
                row_sub_mul(v, q, row.vec);
                if (track_) detail::combo_sub_mul(combo, q, row.combo);
                continue;
            }
            // gcd merge: the pivot shrinks to gcd(a, v[c]).
            mpz_class s, t;
            mpz_class g = ext_gcd(a, v[c], s, t);
            mpz_class a_g = a / g, b_g = v[c] / g;
            ZVec merged(n_);
            for (std::size_t i = 0; i < n_; ++i) merged[i] = s * row.vec[i] + t * v[i];
            ZVec reduced(n_);
            for (std::size_t i = 0; i < n_; ++i) reduced[i] = a_g * v[i] - b_g * row.vec[i];
            Combo merged_combo, reduced_combo;
            if (track_) {
                merged_combo = detail::combo_linear(s, row.combo, t, combo);
                reduced_combo = detail::combo_linear(a_g, combo, -b_g, row.combo);
            }
            row.vec = std::move(merged);
            row.combo = std::move(merged_combo);
            v = std::move(reduced);
            combo = std::move(reduced_combo);
            reduce_column(pos);
            if (changed_out) *changed_out = true;
            // v[c] is now zero; continue to later positions.
        }
        if (kernel_out) *kernel_out = std::move(combo);
        return false;
    }

    // Restores 0 <= entry < pivot at the pivot column of `pos` for all other
    // rows (keeps entries bounded and the basis canonical).
    void reduce_column(std::size_t pos) {
        int r = pos_of_row_[pos];
        int c = order_[pos];
        const Row& piv = rows_[r];
        for (std::size_t p2 = 0; p2 < n_; ++p2) {
            int r2 = pos_of_row_[p2];
            if (r2 < 0 || r2 == r) continue;
            Row& row = rows_[r2];
            if (row.vec[c] == 0) continue;
            mpz_class q = fdiv_q(row.vec[c], piv.vec[c]);
            if (q == 0) continue;
            row_sub_mul(row.vec, q, piv.vec);
            if (track_) detail::combo_sub_mul(row.combo, q, piv.combo);
        }
    }

    static void negate(Combo& c) {
        for (auto& [k, v] : c) v = -v;
    }

    std::size_t n_;
    std::vector<int> order_;
    bool track_;
    std::vector<Row> rows_;
    std::vector<int> pos_of_row_;  // pivot position -> index into rows_, -1 if none
    std::size_t n_inputs_ = 0;
};

// Column order that processes coordinate `last` after all others. Used for
// lattice-line intersections.
inline std::vector<int> column_order_with_last(std::size_t n, int last) {
    std::vector<int> order;
    order.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        if (static_cast<int>(i) != last) order.push_back(static_cast<int>(i));
    order.push_back(last);
    return order;
}

// Smith normal form invariants of an integer matrix: the nonzero diagonal
// entries d_1 | d_2 | ... (all positive). The count of invariants equals the
// rank.
inline std::vector<mpz_class> smith_invariants(ZMat a) {
    std::size_t m = a.size();
    std::size_t n = m == 0 ? 0 : a[0].size();
    std::vector<mpz_class> inv;
    std::size_t k = 0;
    while (k < m && k < n) {
        // find a nonzero pivot with minimal absolute value
        std::size_t pi = k, pj = k;
        bool found = false;
        mpz_class best;
        for (std::size_t i = k; i < m; ++i)
            for (std::size_t j = k; j < n; ++j)
                if (a[i][j] != 0) {
                    mpz_class v = abs(a[i][j]);
                    if (!found || v < best) {
                        best = v;
                        pi = i;
                        pj = j;
                        found = true;
                    }
                }
        if (!found) break;
        std::swap(a[k], a[pi]);
        for (std::size_t i = 0; i < m; ++i) std::swap(a[i][k], a[i][pj]);
        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = k + 1; i < m; ++i) {
                if (a[i][k] == 0) continue;
                mpz_class q = a[i][k] / a[k][k];
                for (std::size_t j = k; j < n; ++j) a[i][j] -= q * a[k][j];
                if (a[i][k] != 0) {
                    std::swap(a[i], a[k]);
                    clean = false;
                }
            }
            for (std::size_t j = k + 1; j < n; ++j) {
                if (a[k][j] == 0) continue;
                mpz_class q = a[k][j] / a[k][k];
                for (std::size_t i = k; i < m; ++i) a[i][j] -= q * a[i][k];
                if (a[k][j] != 0) {
                    for (std::size_t i = k; i < m; ++i) std::swap(a[i][j], a[i][k]);
                    clean = false;
                }
            }
        }
        if (a[k][k] < 0) a[k][k] = -a[k][k];
        ++k;
    }
    // enforce the divisibility chain
    for (std::size_t i = 0; i < k; ++i) inv.push_back(a[i][i]);
    for (std::size_t i = 0; i + 1 < inv.size(); ++i)
        for (std::size_t j = i + 1; j < inv.size(); ++j) {
            if (inv[j] % inv[i] == 0) continue;
            mpz_class g = gcd(inv[i], inv[j]);
            mpz_class l = inv[i] / g * inv[j];
            inv[i] = g;
            inv[j] = l;
        }
    std::sort(inv.begin(), inv.end());
    return inv;
}

// Basis of the integer kernel {x : sum_i x_i row_i = 0} of the row span.
inline ZMat left_kernel(const ZMat& rows) {
    if (rows.empty()) return {};
    std::size_t n = rows[0].size();
    LatticeBuilder b(n, {}, true);
    ZMat kernel;
    std::size_t count = rows.size();
    for (std::size_t i = 0; i < count; ++i) {
        auto rel = b.insert_with_kernel(rows[i]);
        if (rel) {
            ZVec x(count, 0);
            for (const auto& [k, c] : *rel) x[k] = c;
            kernel.push_back(std::move(x));
        }
    }
    return kernel;
}

inline ZMat mat_identity(std::size_t n) {
    ZMat m(n, ZVec(n, 0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline ZMat mat_mul(const ZMat& a, const ZMat& b) {
    std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    ZMat out(n, ZVec(m, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (std::size_t j = 0; j < m; ++j)
                if (b[t][j] != 0) out[i][j] += a[i][t] * b[t][j];
        }
    return out;
}

inline ZVec mat_vec(const ZMat& a, const ZVec& x) {
    ZVec out(a.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            if (a[i][j] != 0 && x[j] != 0) out[i] += a[i][j] * x[j];
    return out;
}

inline bool mat_equal(const ZMat& a, const ZMat& b) { return a == b; }

inline bool is_unimodular(const ZMat& a) {
    if (a.empty()) return true;
    if (a.size() != a[0].size()) return false;
    auto inv = smith_invariants(a);
    if (inv.size() != a.size()) return false;
    for (const auto& d : inv)
        if (d != 1) return false;
    return true;
}

// Gaussian elimination over F_p with optional certificate tracking.
class FpBuilder {
public:
    FpBuilder(std::size_t n, long p, bool track = false) : n_(n), p_(p), track_(track) {
        pos_of_row_.assign(n_, -1);
    }

    std::size_t rank() const { return rows_.size(); }

    bool insert(std::vector<long> v) {
        std::vector<long> combo;
        if (track_) {
            combo.assign(n_inputs_ + 1, 0);
            combo[n_inputs_] = 1;
        }
        ++n_inputs_;
        return reduce_in(std::move(v), std::move(combo)) >= 0;
    }

    // If v is in the span, returns coefficients over the inserted generators.
    std::optional<std::vector<long>> represent(std::vector<long> v) const {
        std::vector<long> acc(n_inputs_, 0);
        for (auto& x : v) x = ((x % p_) + p_) % p_;
        for (std::size_t c = 0; c < n_; ++c) {
            long x = v[c] % p_;
            if (x == 0) continue;
            int r = pos_of_row_[c];
            if (r < 0) return std::nullopt;
            // basis rows are normalized with pivot 1
            for (std::size_t j = 0; j < n_; ++j)
                v[j] = (v[j] - mulmod(x, rows_[r].vec[j], p_) % p_ + p_) % p_;
            if (track_)
                for (std::size_t j = 0; j < rows_[r].combo.size(); ++j)
                    acc[j] = ((acc[j] + mulmod(x, rows_[r].combo[j], p_)) % p_ + p_) % p_;
        }
        for (long x : v)
            if (x % p_ != 0) return std::nullopt;
        return acc;
    }

    bool contains(const std::vector<long>& v) const {
        std::vector<long> w = v;
        for (std::size_t c = 0; c < n_; ++c) {
            long x = ((w[c] % p_) + p_) % p_;
            if (x == 0) continue;
            int r = pos_of_row_[c];
            if (r < 0) return false;
            for (std::size_t j = c; j < n_; ++j)
                w[j] = ((w[j] - mulmod(x, rows_[r].vec[j], p_)) % p_ + p_) % p_;
        }
        for (long x : w)
            if (x % p_ != 0) return false;
        return true;
    }

private:
    struct Row {
        std::vector<long> vec;    // pivot normalized to 1
        std::vector<long> combo;  // over input indices (prefix)
    };

    int reduce_in(std::vector<long> v, std::vector<long> combo) {
        for (auto& x : v) x = ((x % p_) + p_) % p_;
        for (std::size_t c = 0; c < n_; ++c) {
            if (v[c] == 0) continue;
            int r = pos_of_row_[c];
            if (r < 0) {
                long inv = powmod(v[c], p_ - 2, p_);
                for (auto& x : v) x = mulmod(x, inv, p_);
                if (track_)
                    for (auto& x : combo) x = mulmod(x, inv, p_);
                pos_of_row_[c] = static_cast<int>(rows_.size());
                rows_.push_back(Row{std::move(v), std::move(combo)});
                return pos_of_row_[c];
            }
            long x = v[c];
            const Row& row = rows_[r];
            for (std::size_t j = 0; j < n_; ++j)
                v[j] = ((v[j] - mulmod(x, row.vec[j], p_)) % p_ + p_) % p_;
            if (track_) {
                if (combo.size() < row.combo.size()) combo.resize(row.combo.size(), 0);
                for (std::size_t j = 0; j < row.combo.size(); ++j)
                    combo[j] = ((combo[j] - mulmod(x, row.combo[j], p_)) % p_ + p_) % p_;
            }
        }
        return -1;
    }

    std::size_t n_;
    long p_;
    bool track_;
    std::vector<Row> rows_;
    std::vector<int> pos_of_row_;
    std::size_t n_inputs_ = 0;
};

}  // namespace normrel

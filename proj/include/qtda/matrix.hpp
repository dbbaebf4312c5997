/**
 * Sparse signed matrices with labelled row/column spaces, plus the exact
 * linear-algebra kernel used throughout: fraction-free (Bareiss) rank over
 * the rationals, modular rank over GF(p), rational kernel bases and linear
 * solves, and conversion to Eigen for spectral work.
 *
 * Storage is a coordinate list; routines densify below the worked-example
 * scale (and, for exact elimination, at any size -- instances are desk
 * scale by design).
 */

#ifndef QTDA_MATRIX_HPP
#define QTDA_MATRIX_HPP

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "field.hpp"

namespace qtda {

using DenseRational = std::vector<std::vector<Rational>>;

/** Coordinate-list matrix with labelled bases. */
struct SparseSignedMatrix {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    std::vector<std::tuple<int, int, Rational>> entries;  ///< (row, col, value), value != 0

    void add(int r, int c, Rational v) {
        if (v == 0) return;
        entries.emplace_back(r, c, std::move(v));
    }

    DenseRational to_dense() const {
        DenseRational d(n_rows, std::vector<Rational>(n_cols, Rational(0)));
        for (const auto& [r, c, v] : entries) d[r][c] += v;
        return d;
    }

    Eigen::MatrixXd to_real() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_rows, n_cols);
        for (const auto& [r, c, v] : entries) m(r, c) += v.convert_to<double>();
        return m;
    }

    SparseSignedMatrix transpose() const {
        SparseSignedMatrix t;
        t.n_rows = n_cols;
        t.n_cols = n_rows;
        t.row_labels = col_labels;
        t.col_labels = row_labels;
        for (const auto& [r, c, v] : entries) t.entries.emplace_back(c, r, v);
        return t;
    }
};

namespace linalg {

namespace detail128 {

using i128 = __int128;

/// Raised internally when the 128-bit fast path would lose exactness;
/// callers fall back to arbitrary precision.
struct Overflow {};

inline constexpr i128 kGuard = (i128(1) << 62);

/** Convert to a 128-bit integer matrix; false if any entry is non-integer
 *  or too large for safe fraction-free elimination. */
inline bool to_i128(const DenseRational& in, std::vector<std::vector<i128>>& out) {
    const int m = static_cast<int>(in.size());
    const int n = m ? static_cast<int>(in.front().size()) : 0;
    out.assign(m, std::vector<i128>(n, 0));
    const BigInt lim(static_cast<long long>(1) << 62);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) {
            const Rational& q = in[i][j];
            if (denominator(q) != 1) return false;
            const BigInt& num = numerator(q);
            if (num >= lim || num <= -lim) return false;
            out[i][j] = static_cast<long long>(num);
        }
    return true;
}

inline void check(i128 v) {
    if (v >= kGuard || v <= -kGuard) throw Overflow{};
}

inline Rational to_rational(i128 v) {
    const bool neg = v < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : v;
    BigInt b = static_cast<std::uint64_t>(u >> 64);
    b <<= 64;
    b += static_cast<std::uint64_t>(u);
    return Rational(neg ? -b : b);
}

/**
 * Fraction-free Gauss-Jordan (Bareiss-style exact division by the previous
 * pivot).  Returns the pivot columns; on exit every pivot row r has
 * a[r][pivot_col[r]] equal to the final pivot d (shared across rows).
 * Throws Overflow if entries leave the guarded range or a division is not
 * exact (the caller then falls back to rational arithmetic).
 */
inline std::vector<int> jordan(std::vector<std::vector<i128>>& a) {
    const int m = static_cast<int>(a.size());
    const int n = m ? static_cast<int>(a.front().size()) : 0;
    std::vector<int> pivot_col;
    i128 prev = 1;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int pr = -1;
        for (int r = row; r < m; ++r)
            if (a[r][col] != 0) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(a[row], a[pr]);
        const i128 piv = a[row][col];
        check(piv);
        for (int r = 0; r < m; ++r) {
            if (r == row) continue;
            const i128 f = a[r][col];
            check(f);
            for (int j = 0; j < n; ++j) {
                check(a[r][j]);
                check(a[row][j]);
                const i128 v = piv * a[r][j] - f * a[row][j];
                if (v % prev != 0) throw Overflow{};  // not in the exact-division regime
                a[r][j] = v / prev;
            }
        }
        prev = piv;
        pivot_col.push_back(col);
        ++row;
    }
    // Rescale earlier pivot rows so every pivot equals the final one.
    if (!pivot_col.empty()) {
        const i128 d = a[static_cast<int>(pivot_col.size()) - 1]
                        [pivot_col.back()];
        for (int r = 0; r < static_cast<int>(pivot_col.size()); ++r) {
            const i128 p = a[r][pivot_col[r]];
            if (p == d) continue;
            if (p == 0) throw Overflow{};
            for (int j = 0; j < n; ++j) {
                check(a[r][j]);
                const i128 v = a[r][j] * d;
                if (v % p != 0) throw Overflow{};
                a[r][j] = v / p;
            }
        }
    }
    return pivot_col;
}

}  // namespace detail128

/** Fraction-free (Bareiss) rank after clearing denominators row-wise. */
inline int rank_rational(const DenseRational& in) {
    const int m = static_cast<int>(in.size());
    const int n = m ? static_cast<int>(in.front().size()) : 0;
    if (m == 0 || n == 0) return 0;
    // 128-bit fast path for small integer matrices (the common case:
    // boundary operators and their Gram matrices).
    {
        std::vector<std::vector<detail128::i128>> a;
        if (detail128::to_i128(in, a)) {
            try {
                detail128::i128 prev = 1;
                int rank = 0;
                for (int col = 0; col < n && rank < m; ++col) {
                    int pivot = -1;
                    for (int r = rank; r < m; ++r)
                        if (a[r][col] != 0) {
                            pivot = r;
                            break;
                        }
                    if (pivot < 0) continue;
                    std::swap(a[rank], a[pivot]);
                    detail128::check(a[rank][col]);
                    for (int r = rank + 1; r < m; ++r) {
                        detail128::check(a[r][col]);
                        for (int j = col + 1; j < n; ++j) {
                            detail128::check(a[r][j]);
                            detail128::check(a[rank][j]);
                            const detail128::i128 v =
                                a[rank][col] * a[r][j] - a[r][col] * a[rank][j];
                            a[r][j] = v / prev;  // exact by the Bareiss identity
                        }
                        a[r][col] = 0;
                    }
                    prev = a[rank][col];
                    ++rank;
                }
                return rank;
            } catch (const detail128::Overflow&) {
                // fall through to arbitrary precision
            }
        }
    }
    // Clear denominators: multiply each row by the LCM of its denominators
    // (rank-preserving), then run integer-preserving elimination.
    std::vector<std::vector<BigInt>> a(m, std::vector<BigInt>(n));
    for (int i = 0; i < m; ++i) {
        BigInt l = 1;
        for (int j = 0; j < n; ++j) l = boost::multiprecision::lcm(l, denominator(in[i][j]));
        for (int j = 0; j < n; ++j)
            a[i][j] = numerator(in[i][j]) * (l / denominator(in[i][j]));
    }
    BigInt prev = 1;
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int pivot = -1;
        for (int r = rank; r < m; ++r)
            if (a[r][col] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(a[rank], a[pivot]);
        for (int r = rank + 1; r < m; ++r) {
            for (int j = col + 1; j < n; ++j)
                a[r][j] = (a[rank][col] * a[r][j] - a[r][col] * a[rank][j]) / prev;
            a[r][col] = 0;
        }
        prev = a[rank][col];
        ++rank;
    }
    return rank;
}

/** Rank over GF(p) via modular Gaussian elimination. */
inline int rank_gfp(const DenseRational& in, std::uint64_t p) {
    const int m = static_cast<int>(in.size());
    const int n = m ? static_cast<int>(in.front().size()) : 0;
    if (m == 0 || n == 0) return 0;
    auto reduce = [&](const Rational& q) -> std::uint64_t {
        if (denominator(q) == 1) {  // common case: integer entries
            BigInt num = numerator(q) % BigInt(p);
            if (num < 0) num += BigInt(p);
            return static_cast<std::uint64_t>(num);
        }
        const BigInt pp(p);
        BigInt num = numerator(q) % pp;
        BigInt den = denominator(q) % pp;
        if (den == 0) throw ComputeError("denominator divisible by p in GF(p) reduction");
        if (num < 0) num += pp;
        // den^(p-2) mod p inverts the denominator (Fermat).
        BigInt inv = boost::multiprecision::powm(den, pp - 2, pp);
        return static_cast<std::uint64_t>(BigInt((num * inv) % pp));
    };
    std::vector<std::vector<std::uint64_t>> a(m, std::vector<std::uint64_t>(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a[i][j] = reduce(in[i][j]);
    auto inv_mod = [&](std::uint64_t x) {
        return static_cast<std::uint64_t>(
            BigInt(boost::multiprecision::powm(BigInt(x), BigInt(p) - 2, BigInt(p))));
    };
    int rank = 0;
    for (int col = 0; col < n && rank < m; ++col) {
        int pivot = -1;
        for (int r = rank; r < m; ++r)
            if (a[r][col]) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(a[rank], a[pivot]);
        const std::uint64_t piv_inv = inv_mod(a[rank][col]);
        for (int r = rank + 1; r < m; ++r) {
            if (!a[r][col]) continue;
            const std::uint64_t f = (a[r][col] * piv_inv) % p;
            for (int j = col; j < n; ++j)
                a[r][j] = (a[r][j] + p * p - (f * a[rank][j]) % p) % p;
        }
        ++rank;
    }
    return rank;
}

/** Rank over a selectable exact field (Real delegates to a rational rank). */
inline int rank(const DenseRational& in, const FieldTag& field) {
    switch (field.kind) {
        case FieldTag::Kind::GF2: return rank_gfp(in, 2);
        case FieldTag::Kind::GFP: return rank_gfp(in, field.p);
        case FieldTag::Kind::Rational:
        case FieldTag::Kind::Real: return rank_rational(in);
    }
    throw ConfigError("unknown field");
}

/** Columns spanning the (right) null space over the selected exact field. */
inline DenseRational kernel_basis(const DenseRational& in, const FieldTag& field) {
    const int m = static_cast<int>(in.size());
    const int n = m ? static_cast<int>(in.front().size()) : 0;
    if (n == 0) return {};
    if (field.kind == FieldTag::Kind::Rational || field.kind == FieldTag::Kind::Real) {
        // 128-bit fraction-free fast path (integer kernel vectors).
        std::vector<std::vector<detail128::i128>> a;
        if (detail128::to_i128(in, a) && m > 0) {
            try {
                const std::vector<int> pivot_col = detail128::jordan(a);
                std::vector<char> is_pivot(n, 0);
                for (int c : pivot_col) is_pivot[c] = 1;
                const detail128::i128 d =
                    pivot_col.empty()
                        ? 1
                        : a[static_cast<int>(pivot_col.size()) - 1][pivot_col.back()];
                std::vector<std::vector<Rational>> cols;
                for (int free = 0; free < n; ++free) {
                    if (is_pivot[free]) continue;
                    std::vector<Rational> v(n, Rational(0));
                    v[free] = detail128::to_rational(d);
                    for (int r = 0; r < static_cast<int>(pivot_col.size()); ++r)
                        if (a[r][free] != 0)
                            v[pivot_col[r]] = -detail128::to_rational(a[r][free]);
                    cols.push_back(std::move(v));
                }
                DenseRational out(n, std::vector<Rational>(cols.size(), Rational(0)));
                for (std::size_t c = 0; c < cols.size(); ++c)
                    for (int r = 0; r < n; ++r) out[r][c] = cols[c][r];
                return out;
            } catch (const detail128::Overflow&) {
                // fall through to rational RREF
            }
        }
    }
    if (field.kind == FieldTag::Kind::GF2 || field.kind == FieldTag::Kind::GFP) {
        // Reduce mod p, do RREF over GF(p), read off free columns.
        const std::uint64_t p = field.kind == FieldTag::Kind::GF2 ? 2 : field.p;
        auto reduce = [&](const Rational& q) -> std::uint64_t {
            if (denominator(q) == 1) {
                BigInt num = numerator(q) % BigInt(p);
                if (num < 0) num += BigInt(p);
                return static_cast<std::uint64_t>(num);
            }
            const BigInt pp(p);
            BigInt num = numerator(q) % pp, den = denominator(q) % pp;
            if (den == 0) throw ComputeError("denominator divisible by p");
            if (num < 0) num += pp;
            BigInt inv = boost::multiprecision::powm(den, pp - 2, pp);
            return static_cast<std::uint64_t>(BigInt((num * inv) % pp));
        };
        std::vector<std::vector<std::uint64_t>> a(std::max(m, 1),
                                                  std::vector<std::uint64_t>(n, 0));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) a[i][j] = reduce(in[i][j]);
        auto inv_mod = [&](std::uint64_t x) {
            return static_cast<std::uint64_t>(
                BigInt(boost::multiprecision::powm(BigInt(x), BigInt(p) - 2, BigInt(p))));
        };
        std::vector<int> pivot_col;
        int row = 0;
        for (int col = 0; col < n && row < m; ++col) {
            int pr = -1;
            for (int r = row; r < m; ++r)
                if (a[r][col]) {
                    pr = r;
                    break;
                }
            if (pr < 0) continue;
            std::swap(a[row], a[pr]);
            const std::uint64_t pi = inv_mod(a[row][col]);
            for (int j = 0; j < n; ++j) a[row][j] = (a[row][j] * pi) % p;
            for (int r = 0; r < m; ++r) {
                if (r == row || !a[r][col]) continue;
                const std::uint64_t f = a[r][col];
                for (int j = 0; j < n; ++j)
                    a[r][j] = (a[r][j] + p * p - (f * a[row][j]) % p) % p;
            }
            pivot_col.push_back(col);
            ++row;
        }
        std::vector<char> is_pivot(n, 0);
        for (int c : pivot_col) is_pivot[c] = 1;
        DenseRational basis(n);
        std::vector<std::vector<Rational>> cols;
        for (int free = 0; free < n; ++free) {
            if (is_pivot[free]) continue;
            std::vector<Rational> v(n, Rational(0));
            v[free] = 1;
            for (int r = 0; r < static_cast<int>(pivot_col.size()); ++r) {
                const std::uint64_t val = a[r][free];
                if (val) v[pivot_col[r]] = Rational(p - val);
            }
            cols.push_back(std::move(v));
        }
        DenseRational out(n, std::vector<Rational>(cols.size(), Rational(0)));
        for (std::size_t c = 0; c < cols.size(); ++c)
            for (int r = 0; r < n; ++r) out[r][c] = cols[c][r];
        return out;
    }
    // Rational RREF.
    DenseRational a = in;
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int pr = -1;
        for (int r = row; r < m; ++r)
            if (a[r][col] != 0) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(a[row], a[pr]);
        const Rational piv = a[row][col];
        for (int j = 0; j < n; ++j) a[row][j] /= piv;
        for (int r = 0; r < m; ++r) {
            if (r == row || a[r][col] == 0) continue;
            const Rational f = a[r][col];
            for (int j = 0; j < n; ++j) a[r][j] -= f * a[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }
    std::vector<char> is_pivot(n, 0);
    for (int c : pivot_col) is_pivot[c] = 1;
    std::vector<std::vector<Rational>> cols;
    for (int free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(n, Rational(0));
        v[free] = 1;
        for (int r = 0; r < static_cast<int>(pivot_col.size()); ++r)
            if (a[r][free] != 0) v[pivot_col[r]] = -a[r][free];
        cols.push_back(std::move(v));
    }
    DenseRational out(n, std::vector<Rational>(cols.size(), Rational(0)));
    for (std::size_t c = 0; c < cols.size(); ++c)
        for (int r = 0; r < n; ++r) out[r][c] = cols[c][r];
    return out;
}

/**
 * Particular solution X of A X = B over Q; throws ComputeError if the
 * system is inconsistent.  Used for the exact Schur-complement route where
 * consistency is guaranteed structurally.
 */
inline DenseRational solve_consistent(const DenseRational& A, const DenseRational& B) {
    const int m = static_cast<int>(A.size());
    const int n = m ? static_cast<int>(A.front().size()) : 0;
    const int q = B.empty() ? 0 : static_cast<int>(B.front().size());
    if (static_cast<int>(B.size()) != m) throw ConfigError("solve: row mismatch");
    // 128-bit fraction-free fast path on [A | B].
    {
        std::vector<std::vector<detail128::i128>> a, b;
        if (detail128::to_i128(A, a) && detail128::to_i128(B, b) && m > 0) {
            try {
                std::vector<std::vector<detail128::i128>> ab(
                    m, std::vector<detail128::i128>(n + q, 0));
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < n; ++j) ab[i][j] = a[i][j];
                    for (int j = 0; j < q; ++j) ab[i][n + j] = b[i][j];
                }
                std::vector<int> pivot_col = detail128::jordan(ab);
                // A pivot in the B block means the system is inconsistent.
                if (!pivot_col.empty() && pivot_col.back() >= n)
                    throw ComputeError("inconsistent linear system");
                const detail128::i128 d =
                    pivot_col.empty()
                        ? 1
                        : ab[static_cast<int>(pivot_col.size()) - 1][pivot_col.back()];
                for (int r = static_cast<int>(pivot_col.size()); r < m; ++r)
                    for (int j = 0; j < q; ++j)
                        if (ab[r][n + j] != 0) throw ComputeError("inconsistent linear system");
                const Rational dr = detail128::to_rational(d);
                DenseRational X(n, std::vector<Rational>(q, Rational(0)));
                for (int r = 0; r < static_cast<int>(pivot_col.size()); ++r)
                    for (int j = 0; j < q; ++j)
                        if (ab[r][n + j] != 0)
                            X[pivot_col[r]][j] = detail128::to_rational(ab[r][n + j]) / dr;
                return X;
            } catch (const detail128::Overflow&) {
                // fall through to rational RREF
            }
        }
    }
    // RREF of [A | B].
    DenseRational a(m, std::vector<Rational>(n + q, Rational(0)));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) a[i][j] = A[i][j];
        for (int j = 0; j < q; ++j) a[i][n + j] = B[i][j];
    }
    std::vector<int> pivot_col;
    int row = 0;
    for (int col = 0; col < n && row < m; ++col) {
        int pr = -1;
        for (int r = row; r < m; ++r)
            if (a[r][col] != 0) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        std::swap(a[row], a[pr]);
        const Rational piv = a[row][col];
        for (int j = 0; j < n + q; ++j) a[row][j] /= piv;
        for (int r = 0; r < m; ++r) {
            if (r == row || a[r][col] == 0) continue;
            const Rational f = a[r][col];
            for (int j = 0; j < n + q; ++j) a[r][j] -= f * a[row][j];
        }
        pivot_col.push_back(col);
        ++row;
    }
    for (int r = row; r < m; ++r)
        for (int j = 0; j < q; ++j)
            if (a[r][n + j] != 0) throw ComputeError("inconsistent linear system");
    DenseRational X(n, std::vector<Rational>(q, Rational(0)));
    for (int r = 0; r < static_cast<int>(pivot_col.size()); ++r)
        for (int j = 0; j < q; ++j) X[pivot_col[r]][j] = a[r][n + j];
    return X;
}

/** [A | B] horizontal concatenation (same row count). */
inline DenseRational hcat(const DenseRational& A, const DenseRational& B) {
    const int m = static_cast<int>(std::max(A.size(), B.size()));
    const int na = A.empty() ? 0 : static_cast<int>(A.front().size());
    const int nb = B.empty() ? 0 : static_cast<int>(B.front().size());
    if (!A.empty() && !B.empty() && A.size() != B.size())
        throw ConfigError("hcat: row mismatch");
    DenseRational out(m, std::vector<Rational>(na + nb, Rational(0)));
    for (int i = 0; i < static_cast<int>(A.size()); ++i)
        for (int j = 0; j < na; ++j) out[i][j] = A[i][j];
    for (int i = 0; i < static_cast<int>(B.size()); ++i)
        for (int j = 0; j < nb; ++j) out[i][na + j] = B[i][j];
    return out;
}

/** C = A * B over Q. */
inline DenseRational multiply(const DenseRational& A, const DenseRational& B) {
    const int m = static_cast<int>(A.size());
    const int n = m ? static_cast<int>(A.front().size()) : 0;
    const int q = B.empty() ? 0 : static_cast<int>(B.front().size());
    if (static_cast<int>(B.size()) != n) throw ConfigError("multiply: shape mismatch");
    // 128-bit fast path for small integer operands.
    {
        std::vector<std::vector<detail128::i128>> a, b;
        if (detail128::to_i128(A, a) && detail128::to_i128(B, b)) {
            bool small = true;
            const detail128::i128 lim = detail128::i128(1) << 48;
            for (const auto& row : a)
                for (detail128::i128 v : row)
                    if (v >= lim || v <= -lim) small = false;
            for (const auto& row : b)
                for (detail128::i128 v : row)
                    if (v >= lim || v <= -lim) small = false;
            if (small && static_cast<long long>(n) < (1LL << 24)) {
                DenseRational C(m, std::vector<Rational>(q, Rational(0)));
                std::vector<detail128::i128> acc(q);
                for (int i = 0; i < m; ++i) {
                    std::fill(acc.begin(), acc.end(), 0);
                    for (int l = 0; l < n; ++l) {
                        const detail128::i128 av = a[i][l];
                        if (av == 0) continue;
                        for (int j = 0; j < q; ++j)
                            if (b[l][j] != 0) acc[j] += av * b[l][j];
                    }
                    for (int j = 0; j < q; ++j)
                        if (acc[j] != 0) C[i][j] = detail128::to_rational(acc[j]);
                }
                return C;
            }
        }
    }
    DenseRational C(m, std::vector<Rational>(q, Rational(0)));
    for (int i = 0; i < m; ++i)
        for (int l = 0; l < n; ++l) {
            if (A[i][l] == 0) continue;
            for (int j = 0; j < q; ++j)
                if (B[l][j] != 0) C[i][j] += A[i][l] * B[l][j];
        }
    return C;
}

inline DenseRational transpose(const DenseRational& A) {
    const int m = static_cast<int>(A.size());
    const int n = m ? static_cast<int>(A.front().size()) : 0;
    DenseRational T(n, std::vector<Rational>(m, Rational(0)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) T[j][i] = A[i][j];
    return T;
}

}  // namespace linalg

/** Matrix dump `{"rows": [...], "cols": [...], "field": ..., "entries": [[r, c, "num/den"], ...]}`. */
inline nlohmann::json matrix_to_json(const SparseSignedMatrix& m, const FieldTag& field) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [r, c, v] : m.entries) {
        const std::string val =
            numerator(v).str() + (denominator(v) == 1 ? "" : "/" + denominator(v).str());
        entries.push_back(nlohmann::json::array({r, c, val}));
    }
    return nlohmann::json{{"rows", m.row_labels},
                          {"cols", m.col_labels},
                          {"field", field.name()},
                          {"entries", entries}};
}

}  // namespace qtda

#endif  // QTDA_MATRIX_HPP

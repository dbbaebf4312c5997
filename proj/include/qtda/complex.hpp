/**
 * Vietoris-Rips (clique/flag) complexes at a scale, membership queries, and
 * the two simplex-to-register encodings (direct bit mask and compact
 * vertex-index registers).
 *
 * A k-simplex is stored as its strictly increasing (k+1)-tuple of 0-based
 * vertex indices; within a dimension, tuples are kept in lexicographic
 * order.  Simplices entering at equal scale are ordered by dimension then
 * lexicographic tuple (the configurable tie rule).
 */

#ifndef QTDA_COMPLEX_HPP
#define QTDA_COMPLEX_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "point_cloud.hpp"

namespace qtda {

using Simplex = std::vector<int>;  ///< strictly increasing 0-based vertex indices

/** All simplices at one scale, graded by dimension, closed under faces. */
struct CliqueComplex {
    int scale_index = -1;            ///< position in the filtration schedule (or -1 for ad hoc)
    std::int64_t sq_scale_raw = 0;   ///< raw squared scale (exact threshold)
    double mu = 0.0;                 ///< scale value
    int n_vertices = 0;
    int k_max = 0;                   ///< dimensions 0..k_max+1 are materialized
    std::vector<std::string> labels;
    std::vector<std::vector<Simplex>> simplices_by_dim;  ///< [dim] -> sorted simplex list

    int count(int k) const {
        if (k < 0 || k >= static_cast<int>(simplices_by_dim.size())) return 0;
        return static_cast<int>(simplices_by_dim[k].size());
    }

    const std::vector<Simplex>& simplices(int k) const {
        static const std::vector<Simplex> empty;
        if (k < 0 || k >= static_cast<int>(simplices_by_dim.size())) return empty;
        return simplices_by_dim[k];
    }

    /** Position of `s` in the sorted dimension-k list, or -1. */
    int index_of(const Simplex& s) const {
        const int k = static_cast<int>(s.size()) - 1;
        const auto& list = simplices(k);
        auto it = std::lower_bound(list.begin(), list.end(), s);
        if (it == list.end() || *it != s) return -1;
        return static_cast<int>(it - list.begin());
    }

    std::string label_of(const Simplex& s) const {
        std::string out;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out += labels[s[i]].size() > 1 || labels[s[i - 1]].size() > 1 ? "," : "";
            out += labels[s[i]];
        }
        return out;
    }
};

/** Direct N-bit mask or compact (k+1)-register encoding of a simplex. */
struct SimplexEncoding {
    enum class Kind { direct, compact };
    Kind kind = Kind::direct;
    int n_vertices = 0;
    int register_bits = 0;            ///< compact: ceil(log2(N+1)) bits per register
    std::vector<std::uint8_t> mask;   ///< direct: bit per vertex, exactly k+1 ones
    std::vector<int> registers;       ///< compact: 1-based indices, strictly increasing

    /** Render as the bit string used in worked examples (vertex 1 leftmost). */
    std::string to_string() const {
        std::string out;
        if (kind == Kind::direct) {
            for (int i = 0; i < n_vertices; ++i) out += mask[i] ? '1' : '0';
        } else {
            for (std::size_t r = 0; r < registers.size(); ++r) {
                if (r) out += ' ';
                for (int b = register_bits - 1; b >= 0; --b)
                    out += ((registers[r] >> b) & 1) ? '1' : '0';
            }
        }
        return out;
    }
};

namespace detail {

inline void require_increasing(const Simplex& s) {
    for (std::size_t i = 1; i < s.size(); ++i)
        if (s[i] <= s[i - 1])
            throw ConfigError("simplex tuple must have strictly increasing vertices");
}

inline int ceil_log2(std::int64_t x) {
    int b = 0;
    std::int64_t v = 1;
    while (v < x) {
        v <<= 1;
        ++b;
    }
    return b;
}

}  // namespace detail

/**
 * Flag complex of the threshold graph at the given raw squared scale.
 * Dimensions 0..k_max+1 are materialized (one above the queried k because
 * the (k+1)-boundary is needed downstream).
 */
inline CliqueComplex build_clique_complex(const DistanceMatrix& dm, std::int64_t sq_scale_raw,
                                          int k_max, int scale_index = -1,
                                          std::vector<std::string> labels = {}) {
    const int n = dm.n;
    if (k_max < 0 || k_max > n - 1) throw ConfigError("k_max must lie in [0, N-1]");
    CliqueComplex cx;
    cx.scale_index = scale_index;
    cx.sq_scale_raw = sq_scale_raw;
    cx.mu = std::sqrt(std::ldexp(static_cast<double>(sq_scale_raw), -2 * dm.frac_bits));
    cx.n_vertices = n;
    cx.k_max = k_max;
    cx.labels = labels.empty() ? detail::default_labels(n) : std::move(labels);

    std::vector<std::vector<char>> adj(n, std::vector<char>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            adj[i][j] = (i != j && dm.sq_raw[i][j] <= sq_scale_raw) ? 1 : 0;

    const int top_dim = std::min(k_max + 1, n - 1);
    cx.simplices_by_dim.assign(top_dim + 1, {});
    for (int v = 0; v < n; ++v) cx.simplices_by_dim[0].push_back({v});

    // Depth-first clique extension with vertices added in increasing order;
    // lexicographic output order falls out of the recursion for free.
    std::vector<int> stack;
    auto extend = [&](auto&& self, int last) -> void {
        const int dim = static_cast<int>(stack.size()) - 1;
        if (dim >= 1) cx.simplices_by_dim[dim].push_back(stack);
        if (dim == top_dim) return;
        for (int v = last + 1; v < n; ++v) {
            bool ok = true;
            for (int u : stack)
                if (!adj[u][v]) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            stack.push_back(v);
            self(self, v);
            stack.pop_back();
        }
    };
    for (int v = 0; v < n; ++v) {
        stack = {v};
        extend(extend, v);
    }
    return cx;
}

/** Convenience overload: build at schedule position `scale_index`. */
inline CliqueComplex build_clique_complex(const DistanceMatrix& dm, const FiltrationSchedule& fs,
                                          int scale_index, int k_max,
                                          std::vector<std::string> labels = {}) {
    if (scale_index < 0 || scale_index >= fs.size())
        throw ConfigError("scale index out of range");
    return build_clique_complex(dm, fs.sq_raw[scale_index], k_max, scale_index, std::move(labels));
}

/**
 * Classical semantics of the membership oracle: true iff the (ordered)
 * tuple is a simplex of the complex.  Non-increasing tuples error, mirroring
 * the compact oracle's order verification.
 */
inline bool membership(const Simplex& s, const CliqueComplex& cx) {
    detail::require_increasing(s);
    if (s.empty()) throw ConfigError("empty simplex tuple");
    for (int v : s)
        if (v < 0 || v >= cx.n_vertices) throw ConfigError("vertex index out of range");
    return cx.index_of(s) >= 0;
}

/** Encode a simplex with 1-based vertex values in 1..N. */
inline SimplexEncoding encode_simplex(const std::vector<int>& one_based, SimplexEncoding::Kind kind,
                                      int n_vertices) {
    if (one_based.empty()) throw ConfigError("empty simplex tuple");
    for (std::size_t i = 0; i < one_based.size(); ++i) {
        if (one_based[i] < 1 || one_based[i] > n_vertices)
            throw ConfigError("vertex index out of range 1..N");
        if (i && one_based[i] <= one_based[i - 1])
            throw ConfigError("simplex tuple must have strictly increasing vertices");
    }
    SimplexEncoding enc;
    enc.kind = kind;
    enc.n_vertices = n_vertices;
    if (kind == SimplexEncoding::Kind::direct) {
        enc.mask.assign(n_vertices, 0);
        for (int v : one_based) enc.mask[v - 1] = 1;
    } else {
        enc.register_bits = detail::ceil_log2(static_cast<std::int64_t>(n_vertices) + 1);
        enc.registers = one_based;
    }
    return enc;
}

/** Inverse of encode_simplex (exact round trip). */
inline std::vector<int> decode_simplex(const SimplexEncoding& enc) {
    std::vector<int> out;
    if (enc.kind == SimplexEncoding::Kind::direct) {
        for (int i = 0; i < enc.n_vertices; ++i)
            if (enc.mask[i]) out.push_back(i + 1);
        if (out.empty()) throw ConfigError("direct encoding has empty support");
    } else {
        for (std::size_t i = 0; i < enc.registers.size(); ++i) {
            const int v = enc.registers[i];
            if (v == 0) throw ConfigError("all-zero register inside a valid simplex");
            if (v < 1 || v > enc.n_vertices) throw ConfigError("register value out of range");
            if (i && v <= enc.registers[i - 1])
                throw ConfigError("compact registers must strictly increase");
            out.push_back(v);
        }
    }
    return out;
}

/** Complex dump: `{"scale_index", "mu", "simplices": {"0": [...], ...}}` with 1-based tuples. */
inline nlohmann::json complex_to_json(const CliqueComplex& cx) {
    nlohmann::json simps = nlohmann::json::object();
    for (int k = 0; k < static_cast<int>(cx.simplices_by_dim.size()); ++k) {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& s : cx.simplices_by_dim[k]) {
            nlohmann::json tup = nlohmann::json::array();
            for (int v : s) tup.push_back(v + 1);
            list.push_back(tup);
        }
        simps[std::to_string(k)] = list;
    }
    return nlohmann::json{{"scale_index", cx.scale_index}, {"mu", cx.mu}, {"simplices", simps}};
}

}  // namespace qtda

#endif  // QTDA_COMPLEX_HPP

/**
 * Numeric evaluation of the cost model: membership-oracle, boundary
 * encoding, projector, and state-preparation costs, the total-runtime
 * assembly, and comparisons against prior quantum and classical algorithms.
 *
 * Every asymptotic expression carries a named big-O constant (default 1,
 * user-overridable); logarithms are base 2 and guarded below by 1; ceil is
 * applied to qubit counts only.  Asymptotic claims are evaluated as formula
 * identities, never as measured runtimes.
 */

#ifndef QTDA_RESOURCE_HPP
#define QTDA_RESOURCE_HPP

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "errors.hpp"
#include "sampling.hpp"

namespace qtda {

enum class MemoryModel { qrom, qram };

/** Problem sizes, gaps, targets, and the big-O constants table. */
struct CostModelInput {
    int N = 8, k = 1, d = 2, b = 32;
    double S_k = 1.0;    ///< |S_k^i| (measured, or the binomial bound)
    double S_k1 = 1.0;   ///< |S_{k+1}^j|
    BudgetGaps gaps;
    double Delta = 0.4, eta = 0.05;
    Mapping mapping = Mapping::direct;
    MemoryModel memory = MemoryModel::qrom;
    std::map<std::string, double> constants;

    double constant(const std::string& name) const {
        auto it = constants.find(name);
        return it == constants.end() ? 1.0 : it->second;
    }
    bool has_constant(const std::string& name) const { return constants.count(name) > 0; }
};

namespace detail {

inline double log2g(double x) { return std::max(1.0, std::log2(std::max(x, 2.0))); }

inline double factorial_real(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace detail

struct DepthAncillas {
    double depth = 0.0;
    double ancillas = 0.0;
};

/** Membership-oracle cost for the chosen mapping / memory model. */
inline DepthAncillas membership_cost(const CostModelInput& in, double eps_m) {
    const double N = in.N, k = in.k, d = in.d, b = in.b;
    const double c = in.constant("membership_depth");
    const double ca = in.constant("membership_ancillas");
    if (in.mapping == Mapping::direct) {
        if (in.memory != MemoryModel::qrom)
            throw ConfigError("direct mapping supports QROM only");
        return {c * N * detail::log2g(N), ca * N};
    }
    const double le = detail::log2g(1.0 / std::max(eps_m, 1e-300));
    const double sk = std::sqrt(std::max(k, 1.0));
    if (in.memory == MemoryModel::qrom) {
        const double depth =
            c * (sk * le * (N + detail::log2g(d) * detail::log2g(b) + b) + k);
        const double anc = ca * std::max(detail::log2g(N) + d * b * b, k * detail::log2g(N));
        return {depth, anc};
    }
    const double depth =
        c * (sk * le * (detail::log2g(N) + detail::log2g(d) * detail::log2g(b) + b) + k);
    return {depth, ca * (N * d * b + d * b * b)};
}

/** Boundary-operator projected-unitary-encoding parameters and depth. */
struct BoundaryEncodingCost {
    EncodingParams encoding;
    double depth = 0.0;
};

/** The k-boundary encoding; `dim_offset` = 1 gives the (k+1)-operator variant. */
inline BoundaryEncodingCost boundary_encoding_cost(const CostModelInput& in,
                                                   int dim_offset = 0) {
    const double N = in.N;
    const double kk = in.k + dim_offset;
    const double c = in.constant("boundary_depth");
    BoundaryEncodingCost out;
    if (in.mapping == Mapping::direct) {
        out.encoding = {std::sqrt(N), 0.0, 0.0};
        out.depth = c * std::log2(N);
    } else {
        out.encoding = {std::sqrt((N + 1.0) * (kk + 1.0)), std::log2(kk + 1.0), 0.0};
        out.depth = c * std::max(kk, 1.0) * detail::log2g(std::log2(N + 1.0));
    }
    return out;
}

/** The less efficient Hermitian-embedding foil used for comparison. */
inline BoundaryEncodingCost hayakawa_boundary_encoding(const CostModelInput& in) {
    BoundaryEncodingCost out;
    out.encoding = {static_cast<double>(in.N) * (in.k + 1.0), detail::log2g(in.N), 0.0};
    out.depth = in.constant("boundary_depth") * in.N;  // Omega(N)
    return out;
}

enum class ProjectorKind { ker, im, kerim };

struct ProjectorCost {
    double calls = 0.0;          ///< calls to the inner encodings per use
    double composite_eps = 0.0;  ///< accumulated error of the realized projector
};

/** Threshold-projector call counts and composite errors. */
inline ProjectorCost projector_cost(const CostModelInput& in, ProjectorKind which,
                                    const ErrorBudget& budget) {
    const double c = in.constant("projector_calls");
    const double N = in.N, k = in.k;
    auto eps_boundary_corr = [&](double lambda, double dim_factor, double eps_target) {
        if (in.mapping != Mapping::compact || budget.eps_m <= 0.0) return 0.0;
        return 2.0 * std::sqrt(budget.eps_m * (N + 1.0) * dim_factor) / lambda *
               detail::log2g(1.0 / eps_target);
    };
    if (which == ProjectorKind::ker) {
        if (!(in.gaps.lambda_dk > 0.0)) throw ConfigError("zero boundary gap");
        const double alpha = boundary_encoding_cost(in, 0).encoding.alpha;
        ProjectorCost out;
        out.calls = c * (alpha / in.gaps.lambda_dk) * detail::log2g(1.0 / budget.eps_k);
        out.composite_eps =
            budget.eps_k + eps_boundary_corr(in.gaps.lambda_dk, k + 1.0, budget.eps_k);
        return out;
    }
    if (which == ProjectorKind::im) {
        if (!(in.gaps.lambda_dk1 > 0.0)) throw ConfigError("zero boundary gap");
        const double alpha = boundary_encoding_cost(in, 1).encoding.alpha;
        ProjectorCost out;
        out.calls = c * (alpha / in.gaps.lambda_dk1) * detail::log2g(1.0 / budget.eps_i);
        out.composite_eps =
            budget.eps_i + eps_boundary_corr(in.gaps.lambda_dk1, k + 2.0, budget.eps_i);
        return out;
    }
    if (!(in.gaps.lambda_pipi > 0.0)) throw ConfigError("zero Lambda_PiPi gap");
    const double outer =
        c * (1.0 / in.gaps.lambda_pipi) * detail::log2g(1.0 / budget.eps_p);
    const ProjectorCost ker = projector_cost(in, ProjectorKind::ker, budget);
    const ProjectorCost im = projector_cost(in, ProjectorKind::im, budget);
    ProjectorCost out;
    out.calls = outer;
    const double member_term =
        in.mapping == Mapping::compact && budget.eps_m > 0.0 ? 8.0 * std::sqrt(budget.eps_m)
                                                             : 0.0;
    out.composite_eps =
        outer * std::sqrt(ker.composite_eps + im.composite_eps + member_term) + budget.eps_p;
    return out;
}

struct StatePrepCost {
    double calls = 0.0;  ///< amplitude-amplification rounds (calls to O_m and U_uni)
    double depth = 0.0;  ///< per-call U_uni depth
    double ancillas = 0.0;
};

/** Fixed-point amplitude amplification onto the simplex superposition. */
inline StatePrepCost state_prep_cost(const CostModelInput& in, double eps_psi, double eps_s) {
    if (!(in.S_k >= 1.0)) throw ConfigError("S_k must be >= 1");
    const double binom = detail::binom_real(in.N, in.k + 1);
    StatePrepCost out;
    out.calls = in.constant("state_prep_calls") * std::sqrt(binom / in.S_k) *
                detail::log2g(1.0 / eps_psi);
    const double N = in.N, k = in.k;
    if (in.mapping == Mapping::direct) {
        out.depth = in.constant("dicke_depth") * std::max(k, 1.0) * detail::log2g(N);
        out.ancillas = 0.0;
    } else {
        const double perm_factor =
            std::sqrt(std::pow(k + 1.0, k + 1.0) / detail::factorial_real(in.k + 1));
        out.depth = in.constant("perm_depth") * (detail::log2g(N) + k * detail::log2g(k + 1.0)) *
                        perm_factor * detail::log2g(1.0 / std::max(eps_s, 1e-300)) +
                    in.constant("sort_depth") * std::max(k, 1.0) * detail::log2g(k + 1.0) *
                        detail::log2g(detail::log2g(N));
        out.ancillas =
            in.constant("state_prep_ancillas") * k * (detail::log2g(k + 1.0) + detail::log2g(N));
    }
    return out;
}

/** Per-subroutine breakdown plus assembled totals. */
struct ResourceReport {
    double qubits = 0.0;             ///< main-register qubits (exact, ceil applied)
    double ancillas = 0.0;
    double non_clifford_depth = 0.0;
    double repetitions = 0.0;
    // breakdown
    DepthAncillas membership;
    BoundaryEncodingCost boundary_k, boundary_k1;
    ProjectorCost ker, im, kerim;
    StatePrepCost state_prep;
    double depth_v_psi = 0.0;
    double depth_v_pipi = 0.0;
    ErrorBudget budget;
    std::map<std::string, double> constants_used;

    nlohmann::json to_json() const {
        return nlohmann::json{
            {"qubits", qubits},
            {"ancillas", ancillas},
            {"non_clifford_depth", non_clifford_depth},
            {"repetitions", repetitions},
            {"breakdown",
             {{"membership", {{"depth", membership.depth}, {"ancillas", membership.ancillas}}},
              {"boundary_k",
               {{"alpha", boundary_k.encoding.alpha}, {"depth", boundary_k.depth}}},
              {"boundary_k1",
               {{"alpha", boundary_k1.encoding.alpha}, {"depth", boundary_k1.depth}}},
              {"Pi_Ker", {{"calls", ker.calls}, {"eps", ker.composite_eps}}},
              {"Pi_Im", {{"calls", im.calls}, {"eps", im.composite_eps}}},
              {"Pi_PiPi", {{"calls", kerim.calls}, {"eps", kerim.composite_eps}}},
              {"state_prep",
               {{"calls", state_prep.calls},
                {"depth", state_prep.depth},
                {"ancillas", state_prep.ancillas}}},
              {"V_psi_depth", depth_v_psi},
              {"V_PiPi_depth", depth_v_pipi}}},
            {"budget", budget.to_json()},
            {"constants", constants_used}};
    }
};

/** Main-register qubit count for a mapping (ceil on qubit counts only). */
inline double mapping_qubits(int N, int k, Mapping mapping) {
    if (mapping == Mapping::direct) return N;
    return (k + 1.0) * std::ceil(std::log2(N + 1.0));
}

/**
 * Assemble the full report: circuit depth
 * (1/delta_3) * log2(1/eps_f) * (depth(V_psi) + depth(V_PiPi)), repetition
 * count log2(sqrt(binom)/Delta) * log2(1/eta), and qubit totals.
 */
inline ResourceReport total_runtime(const CostModelInput& in) {
    const double binom = detail::binom_real(in.N, in.k + 1);
    BudgetDims dims{in.S_k, binom, 1.0, 1.0, 1.0};
    ResourceReport rep;
    rep.budget = error_budget(in.Delta, in.eta, in.mapping, in.N, in.k, in.gaps, dims);
    rep.constants_used = in.constants;

    rep.membership = membership_cost(in, rep.budget.eps_m);
    rep.boundary_k = boundary_encoding_cost(in, 0);
    rep.boundary_k1 = boundary_encoding_cost(in, 1);
    rep.ker = projector_cost(in, ProjectorKind::ker, rep.budget);
    rep.im = projector_cost(in, ProjectorKind::im, rep.budget);
    rep.kerim = projector_cost(in, ProjectorKind::kerim, rep.budget);
    rep.state_prep = state_prep_cost(in, rep.budget.eps_psi,
                                     in.mapping == Mapping::compact ? rep.budget.eps_s : 1.0);

    rep.depth_v_psi = rep.state_prep.calls * (rep.membership.depth + rep.state_prep.depth);
    const double depth_ker = rep.ker.calls * (rep.boundary_k.depth + 2.0 * rep.membership.depth);
    const double depth_im = rep.im.calls * (rep.boundary_k1.depth + 2.0 * rep.membership.depth);
    rep.depth_v_pipi = rep.kerim.calls * (depth_ker + depth_im + 4.0 * rep.membership.depth);

    rep.non_clifford_depth = in.constant("total_depth") * (1.0 / rep.budget.delta[2]) *
                             detail::log2g(1.0 / rep.budget.eps_f) *
                             (rep.depth_v_psi + rep.depth_v_pipi);
    rep.repetitions = in.constant("repetitions") * detail::log2g(std::sqrt(binom) / in.Delta) *
                      detail::log2g(1.0 / in.eta);
    rep.qubits = mapping_qubits(in.N, in.k, in.mapping);
    rep.ancillas = rep.membership.ancillas + rep.boundary_k.encoding.ancillas +
                   rep.boundary_k1.encoding.ancillas + rep.state_prep.ancillas;
    return rep;
}

enum class Reference {
    self,
    hayakawa,
    classical_textbook,
    classical_opt,
    classical_sparse,
    classical_power
};

struct ComparisonRow {
    std::string reference;
    std::string param_point;
    double ours = 0.0;
    double theirs = 0.0;
    double ratio = 0.0;  ///< theirs / ours (> 1: we win)
    bool estimated = false;  ///< reference cost is an estimate inherited from the survey table
};

/**
 * Evaluate both cost formulas at the same inputs.  Reference parameters:
 * `omega` (default 2.4), `S_bar` (required for classical_sparse),
 * `beta` (default 1) and `Lambda` (default min boundary gap) for the power
 * method and the prior quantum algorithm.
 */
inline ComparisonRow compare(const CostModelInput& in, Reference reference) {
    const ResourceReport ours_rep = total_runtime(in);
    const double ours = ours_rep.non_clifford_depth * ours_rep.repetitions;
    const double binom = detail::binom_real(in.N, in.k + 1);
    const double omega = in.has_constant("omega") ? in.constant("omega") : 2.4;
    const double lambda = in.has_constant("Lambda")
                              ? in.constant("Lambda")
                              : std::min(in.gaps.lambda_dk, in.gaps.lambda_dk1);
    ComparisonRow row;
    row.param_point = "N=" + std::to_string(in.N) + ";k=" + std::to_string(in.k) +
                      ";Delta=" + std::to_string(in.Delta);
    row.ours = ours;
    switch (reference) {
        case Reference::self:
            row.reference = "self";
            row.theirs = ours;
            break;
        case Reference::hayakawa:
            row.reference = "hayakawa";
            row.estimated = true;  // survey-table estimate, flagged as such
            row.theirs = std::pow(in.N, 8.0) * std::pow(in.k, 4.0) * binom /
                         (in.Delta * in.Delta * lambda * lambda * lambda);
            break;
        case Reference::classical_textbook:
            row.reference = "classical_textbook";
            row.theirs = std::pow(in.S_k1, 3.0);
            break;
        case Reference::classical_opt:
            row.reference = "classical_opt";
            row.theirs = std::pow(in.S_k1, omega);
            break;
        case Reference::classical_sparse: {
            row.reference = "classical_sparse";
            if (!in.has_constant("S_bar"))
                throw ConfigError("classical_sparse comparison requires constant S_bar");
            row.theirs = in.S_k1 + std::pow(in.constant("S_bar"), omega);
            break;
        }
        case Reference::classical_power: {
            row.reference = "classical_power";
            row.estimated = true;
            const double beta = in.has_constant("beta") ? in.constant("beta") : 1.0;
            const double s_kk1 = in.S_k + in.S_k1;
            row.theirs =
                s_kk1 * (in.k * in.k * beta + in.k * beta * beta) / lambda;
            break;
        }
    }
    row.ratio = row.theirs / row.ours;
    return row;
}

/** CSV `reference,param_point,ours,theirs,ratio` for a list of rows. */
inline std::string comparison_to_csv(const std::vector<ComparisonRow>& rows) {
    std::string out = "reference,param_point,ours,theirs,ratio\n";
    for (const auto& r : rows)
        out += r.reference + "," + r.param_point + "," + std::to_string(r.ours) + "," +
               std::to_string(r.theirs) + "," + std::to_string(r.ratio) + "\n";
    return out;
}

}  // namespace qtda

#endif  // QTDA_RESOURCE_HPP

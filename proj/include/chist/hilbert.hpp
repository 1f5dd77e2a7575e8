// Copyright 2026 The chist Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <iterator>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "chist/errors.hpp"

namespace chist {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using Ket = Eigen::VectorXcd;

namespace tol {
inline constexpr double proj = 1e-9;
inline constexpr double norm = 1e-9;
inline constexpr double span = 1e-10;
inline constexpr double unitary = 1e-9;
inline constexpr double commute = 1e-9;
}  // namespace tol

inline bool all_finite(const Operator &a) { return a.allFinite(); }

inline void require_finite(const Operator &a, const char *what) {
    if (!a.allFinite()) throw NotFinite(std::string(what) + ": matrix has non-finite entries");
}

inline void require_square(const Operator &a, const char *what) {
    if (a.rows() != a.cols())
        throw DimensionMismatch(std::string(what) + ": operator is not square (" + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()) + ")");
}

inline void require_same_dim(const Operator &a, const Operator &b, const char *what) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionMismatch(std::string(what) + ": dimensions differ (" + std::to_string(a.rows()) + " vs " +
                                std::to_string(b.rows()) + ")");
}

inline Operator identity(Eigen::Index d) { return Operator::Identity(d, d); }

/// |a><b|
inline Operator outer(const Ket &a, const Ket &b) { return a * b.adjoint(); }

/// Kronecker product with the first factor as the slow index:
/// entry[(i*db + k), (j*db + l)] = a[i,j] * b[k,l].
inline Operator tensor_product(const Operator &a, const Operator &b) {
    require_finite(a, "tensor_product");
    require_finite(b, "tensor_product");
    const Eigen::Index ra = a.rows(), ca = a.cols(), rb = b.rows(), cb = b.cols();
    Operator out(ra * rb, ca * cb);
    for (Eigen::Index i = 0; i < ra; ++i)
        for (Eigen::Index j = 0; j < ca; ++j) out.block(i * rb, j * cb, rb, cb) = a(i, j) * b;
    return out;
}

inline Ket tensor_product(const Ket &a, const Ket &b) {
    Ket out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

template <typename... Rest>
Operator tensor_product(const Operator &a, const Operator &b, const Rest &...rest) {
    return tensor_product(tensor_product(a, b), rest...);
}

template <typename... Rest>
Ket tensor_product(const Ket &a, const Ket &b, const Rest &...rest) {
    return tensor_product(tensor_product(a, b), rest...);
}

/// Operator inner product Tr(A^dagger B).
inline Complex op_inner(const Operator &a, const Operator &b) {
    require_same_dim(a, b, "op_inner");
    // Tr(A^dagger B) = sum_ij conj(A_ij) B_ij, no matrix product needed.
    return a.conjugate().cwiseProduct(b).sum();
}

inline double frobenius(const Operator &a) { return a.norm(); }

inline Operator commutator(const Operator &a, const Operator &b) { return a * b - b * a; }

struct ProjectorCheck {
    bool ok = false;
    double hermiticity_defect = 0.0;
    double idempotency_defect = 0.0;
};

inline ProjectorCheck is_projector(const Operator &p, double tolerance = tol::proj) {
    require_square(p, "is_projector");
    ProjectorCheck r;
    if (!p.allFinite()) {
        r.hermiticity_defect = r.idempotency_defect = std::numeric_limits<double>::infinity();
        return r;
    }
    r.hermiticity_defect = (p - p.adjoint()).norm();
    r.idempotency_defect = (p - p * p).norm();
    r.ok = r.hermiticity_defect < tolerance && r.idempotency_defect < tolerance;
    return r;
}

/// An orthogonal projector. Construction validates Hermiticity, idempotency
/// and an integral trace.
class Projector {
   public:
    Projector() = default;

    explicit Projector(Operator op) : op_(std::move(op)) {
        require_square(op_, "Projector");
        require_finite(op_, "Projector");
        const ProjectorCheck c = is_projector(op_);
        if (!c.ok)
            throw InvalidValue("not a projector: hermiticity defect " + std::to_string(c.hermiticity_defect) +
                               ", idempotency defect " + std::to_string(c.idempotency_defect));
        const double tr = op_.trace().real();
        const double r = std::round(tr);
        if (std::abs(tr - r) >= tol::proj) throw InvalidValue("projector trace is not an integer");
        rank_ = static_cast<int>(r);
    }

    static Projector onto(const Ket &k) {
        const double n = k.norm();
        if (n < tol::span) throw InvalidValue("projector onto a zero ket");
        const Ket u = k / n;
        return Projector(outer(u, u));
    }

    static Projector identity(Eigen::Index d) { return Projector(Operator::Identity(d, d)); }
    static Projector zero(Eigen::Index d) { return Projector(Operator::Zero(d, d)); }

    const Operator &op() const { return op_; }
    int rank() const { return rank_; }
    Eigen::Index dim() const { return op_.rows(); }

    Projector complement() const { return Projector(Operator::Identity(dim(), dim()) - op_); }

   private:
    Operator op_;
    int rank_ = 0;
};

inline Projector tensor_product(const Projector &a, const Projector &b) {
    return Projector(tensor_product(a.op(), b.op()));
}

template <typename... Rest>
Projector tensor_product(const Projector &a, const Projector &b, const Rest &...rest) {
    return tensor_product(tensor_product(a, b), rest...);
}

/// Orthogonal projector onto span(kets). Gram-Schmidt with the tol::span
/// threshold decides linear independence.
inline Projector projector_onto_span(const std::vector<Ket> &kets) {
    if (kets.empty()) throw InvalidValue("projector_onto_span: no kets");
    const Eigen::Index d = kets.front().size();
    std::vector<Ket> basis;
    for (const Ket &k : kets) {
        if (k.size() != d) throw DimensionMismatch("projector_onto_span: kets differ in dimension");
        if (!k.allFinite()) throw NotFinite("projector_onto_span: non-finite amplitude");
        Ket v = k;
        // Two passes of modified Gram-Schmidt keep the basis orthonormal to rounding.
        for (int pass = 0; pass < 2; ++pass)
            for (const Ket &b : basis) v -= b.dot(v) * b;
        const double n = v.norm();
        if (n > tol::span * std::max(1.0, k.norm())) basis.push_back(v / n);
    }
    if (basis.empty()) throw InvalidValue("projector_onto_span: all kets are zero");
    Operator p = Operator::Zero(d, d);
    for (const Ket &b : basis) p += outer(b, b);
    return Projector(p);
}

struct DecompositionMember {
    std::string label;
    Projector projector;
};

struct DecompositionReport {
    bool valid = false;
    double completeness_defect = 0.0;
    double max_overlap = 0.0;
    std::vector<std::string> problems;
};

/// A labelled decomposition of the identity. The constructor does not throw on
/// an incomplete set so that callers can inspect the report; use
/// make_decomposition for the validating form.
class Decomposition {
   public:
    Decomposition() = default;
    explicit Decomposition(std::vector<DecompositionMember> members) : members_(std::move(members)) {}

    const std::vector<DecompositionMember> &members() const { return members_; }
    std::size_t size() const { return members_.size(); }
    Eigen::Index dim() const { return members_.empty() ? 0 : members_.front().projector.dim(); }

    const DecompositionMember &operator[](std::size_t i) const { return members_[i]; }

    /// Returns -1 if the label is absent.
    int index_of(const std::string &label) const {
        for (std::size_t i = 0; i < members_.size(); ++i)
            if (members_[i].label == label) return static_cast<int>(i);
        return -1;
    }

    const Projector &at(const std::string &label) const {
        const int i = index_of(label);
        if (i < 0) throw LabelNotFound("decomposition has no member '" + label + "'");
        return members_[static_cast<std::size_t>(i)].projector;
    }

    bool is_trivial() const { return members_.size() == 1; }

   private:
    std::vector<DecompositionMember> members_;
};

inline DecompositionReport validate_decomposition(const Decomposition &d) {
    DecompositionReport r;
    if (d.size() == 0) {
        r.problems.push_back("decomposition is empty");
        return r;
    }
    const Eigen::Index n = d.dim();
    Operator sum = Operator::Zero(n, n);
    // Rows holding a nonzero entry. PQ only involves the shared ones, which
    // keeps products of block-structured members cheap and still exact.
    std::vector<std::vector<Eigen::Index>> support(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto &m = d[i];
        if (m.projector.dim() != n) continue;
        for (Eigen::Index k = 0; k < n; ++k)
            if (m.projector.op().row(k).cwiseAbs().maxCoeff() > 0.0) support[i].push_back(k);
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto &m = d[i];
        if (m.projector.dim() != n) {
            r.problems.push_back("member '" + m.label + "' has dimension " + std::to_string(m.projector.dim()));
            return r;
        }
        sum += m.projector.op();
        for (std::size_t j = 0; j < i; ++j) {
            if (d[j].label == m.label) r.problems.push_back("duplicate label '" + m.label + "'");
            std::vector<Eigen::Index> shared;
            std::set_intersection(support[j].begin(), support[j].end(), support[i].begin(), support[i].end(),
                                  std::back_inserter(shared));
            if (shared.empty()) continue;
            const double ov =
                (d[j].projector.op()(Eigen::all, shared) * m.projector.op()(shared, Eigen::all)).norm();
            r.max_overlap = std::max(r.max_overlap, ov);
        }
    }
    r.completeness_defect = (sum - Operator::Identity(n, n)).norm();
    if (r.completeness_defect >= tol::proj)
        r.problems.push_back("members do not sum to the identity (defect " + std::to_string(r.completeness_defect) +
                             ")");
    if (r.max_overlap >= tol::proj)
        r.problems.push_back("members are not orthogonal (overlap " + std::to_string(r.max_overlap) + ")");
    r.valid = r.problems.empty();
    return r;
}

inline Decomposition make_decomposition(std::vector<DecompositionMember> members) {
    Decomposition d(std::move(members));
    const DecompositionReport r = validate_decomposition(d);
    if (!r.valid) throw InvalidValue("invalid decomposition: " + r.problems.front());
    return d;
}

inline Decomposition trivial_decomposition(Eigen::Index d) {
    return Decomposition({{"I", Projector::identity(d)}});
}

/// Density operator: Hermitian, positive semidefinite, unit trace.
class DensityOperator {
   public:
    DensityOperator() = default;

    explicit DensityOperator(Operator op) : op_(std::move(op)) {
        require_square(op_, "DensityOperator");
        require_finite(op_, "DensityOperator");
        if ((op_ - op_.adjoint()).norm() >= tol::proj) throw InvalidValue("density operator is not Hermitian");
        if (std::abs(op_.trace() - Complex(1.0)) >= tol::norm)
            throw InvalidValue("density operator trace differs from 1");
        const Operator h = 0.5 * (op_ + op_.adjoint());
        Eigen::SelfAdjointEigenSolver<Operator> es(h, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -tol::proj)
            throw InvalidValue("density operator is not positive semidefinite");
    }

    static DensityOperator pure(const Ket &psi) {
        const double n = psi.norm();
        if (std::abs(n - 1.0) >= tol::norm) throw InvalidValue("pure state must have unit norm");
        return DensityOperator(outer(psi, psi));
    }

    static DensityOperator maximally_mixed(Eigen::Index d) {
        return DensityOperator(Operator::Identity(d, d) / static_cast<double>(d));
    }

    const Operator &op() const { return op_; }
    Eigen::Index dim() const { return op_.rows(); }

   private:
    Operator op_;
};

/// Tr(rho A^dagger B).
inline Complex rho_inner(const DensityOperator &rho, const Operator &a, const Operator &b) {
    require_same_dim(a, b, "rho_inner");
    require_same_dim(rho.op(), a, "rho_inner");
    return (rho.op() * a.adjoint() * b).trace();
}

inline double unitarity_defect(const Operator &u) {
    if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
    return (u.adjoint() * u - Operator::Identity(u.rows(), u.cols())).norm();
}

inline bool is_unitary(const Operator &u, double tolerance = tol::unitary) {
    return u.allFinite() && unitarity_defect(u) < tolerance;
}

inline Ket basis_ket(Eigen::Index d, Eigen::Index i) {
    Ket k = Ket::Zero(d);
    k(i) = 1.0;
    return k;
}

}  // namespace chist

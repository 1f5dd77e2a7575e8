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

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "chist/hilbert.hpp"

namespace chist {

/// Ordered times t_0 < t_1 < ... with printable labels.
class TimeGrid {
   public:
    TimeGrid() = default;

    TimeGrid(std::vector<std::string> labels, std::vector<double> values)
        : labels_(std::move(labels)), values_(std::move(values)) {
        if (values_.empty()) throw InvalidValue("time grid needs at least one time");
        if (labels_.size() != values_.size()) throw InvalidValue("time grid labels and values differ in length");
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) throw NotFinite("time grid value is not finite");
            if (i > 0 && !(values_[i] > values_[i - 1])) {
                if (values_[i] == values_[i - 1]) throw DuplicateTime("time grid repeats " + labels_[i]);
                throw InvalidValue("time grid is not strictly increasing at " + labels_[i]);
            }
        }
    }

    /// Grid with labels t0, t1, ... for the given values.
    static TimeGrid from_values(const std::vector<double> &values) {
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < values.size(); ++i) labels.push_back("t" + std::to_string(i));
        return TimeGrid(labels, values);
    }

    std::size_t size() const { return values_.size(); }
    const std::vector<std::string> &labels() const { return labels_; }
    const std::vector<double> &values() const { return values_; }
    const std::string &label(std::size_t i) const { return labels_.at(i); }
    double value(std::size_t i) const { return values_.at(i); }

    /// Index of the given label, -1 when absent.
    int index_of(const std::string &label) const {
        for (std::size_t i = 0; i < labels_.size(); ++i)
            if (labels_[i] == label) return static_cast<int>(i);
        return -1;
    }

    int index_of_value(double v) const {
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_[i] == v) return static_cast<int>(i);
        return -1;
    }

    bool operator==(const TimeGrid &o) const { return labels_ == o.labels_ && values_ == o.values_; }

   private:
    std::vector<std::string> labels_;
    std::vector<double> values_;
};

/// exp(-i (t_to - t_from) H) with hbar = 1, via the eigendecomposition of H.
inline Operator propagator_from_hamiltonian(const Operator &h, double t_to, double t_from) {
    require_square(h, "propagator_from_hamiltonian");
    require_finite(h, "propagator_from_hamiltonian");
    if ((h - h.adjoint()).norm() >= tol::proj) throw InvalidValue("Hamiltonian is not Hermitian");
    const Operator hs = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> es(hs);
    const double dt = t_to - t_from;
    Eigen::VectorXcd phase(hs.rows());
    for (Eigen::Index i = 0; i < hs.rows(); ++i) phase(i) = std::exp(Complex(0.0, -dt * es.eigenvalues()(i)));
    return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

/// Unitary dynamics on a time grid, stored as the step operators
/// T(t_{j+1}, t_j). Composite propagators are formed on demand.
class PropagatorSet {
   public:
    PropagatorSet() = default;

    PropagatorSet(std::string name, TimeGrid grid, std::vector<Operator> steps,
                  std::optional<Operator> hamiltonian = std::nullopt)
        : name_(std::move(name)), grid_(std::move(grid)), steps_(std::move(steps)), hamiltonian_(std::move(hamiltonian)) {
        if (steps_.size() + 1 != grid_.size())
            throw InvalidValue("propagator set needs " + std::to_string(grid_.size() - 1) + " steps, got " +
                               std::to_string(steps_.size()));
        if (steps_.empty()) {
            if (!hamiltonian_) throw InvalidValue("single-time propagator set needs a dimension (use trivial())");
            dim_ = hamiltonian_->rows();
        } else {
            dim_ = steps_.front().rows();
        }
        for (std::size_t i = 0; i < steps_.size(); ++i) {
            const Operator &s = steps_[i];
            require_finite(s, "PropagatorSet");
            if (s.rows() != dim_ || s.cols() != dim_)
                throw DimensionMismatch("step " + std::to_string(i) + " has the wrong dimension");
            const double defect = unitarity_defect(s);
            if (defect >= tol::unitary)
                throw InvalidValue("step " + grid_.label(i) + "->" + grid_.label(i + 1) +
                                   " is not unitary (defect " + std::to_string(defect) + ")");
        }
    }

    /// Identity dynamics on the grid.
    static PropagatorSet trivial(std::string name, TimeGrid grid, Eigen::Index dim) {
        std::vector<Operator> steps(grid.size() - 1, Operator::Identity(dim, dim));
        return PropagatorSet(std::move(name), std::move(grid), std::move(steps), Operator::Zero(dim, dim));
    }

    static PropagatorSet from_hamiltonian(std::string name, TimeGrid grid, const Operator &h) {
        std::vector<Operator> steps;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i)
            steps.push_back(propagator_from_hamiltonian(h, grid.value(i + 1), grid.value(i)));
        return PropagatorSet(std::move(name), std::move(grid), std::move(steps), h);
    }

    const std::string &name() const { return name_; }
    const TimeGrid &grid() const { return grid_; }
    const std::vector<Operator> &steps() const { return steps_; }
    const Operator &step(std::size_t j) const { return steps_.at(j); }
    const std::optional<Operator> &hamiltonian() const { return hamiltonian_; }
    Eigen::Index dim() const { return dim_; }

    /// T(t_j, t_k).
    Operator propagator(std::size_t j, std::size_t k) const {
        if (j >= grid_.size() || k >= grid_.size())
            throw IndexOutOfRange("propagator index out of range (" + std::to_string(j) + ", " + std::to_string(k) +
                                  ")");
        Operator t = Operator::Identity(dim_, dim_);
        if (j >= k) {
            for (std::size_t s = k; s < j; ++s) t = steps_[s] * t;
            return t;
        }
        for (std::size_t s = j; s < k; ++s) t = steps_[s] * t;
        return t.adjoint();
    }

   private:
    std::string name_;
    TimeGrid grid_;
    std::vector<Operator> steps_;
    std::optional<Operator> hamiltonian_;
    Eigen::Index dim_ = 0;
};

using PropagatorSetPtr = std::shared_ptr<const PropagatorSet>;

inline Operator propagator(const PropagatorSet &ps, std::size_t j, std::size_t k) { return ps.propagator(j, k); }

/// Heisenberg form T(t_r, t_j) P T(t_j, t_r) of an operator given at time j.
inline Operator heisenberg(const Operator &p, const PropagatorSet &ps, std::size_t j, std::size_t r) {
    if (p.rows() != ps.dim() || p.cols() != ps.dim())
        throw DimensionMismatch("heisenberg: operator dimension " + std::to_string(p.rows()) +
                                " does not match dynamics dimension " + std::to_string(ps.dim()));
    const Operator t = ps.propagator(r, j);
    return t * p * t.adjoint();
}

inline Projector heisenberg(const Projector &p, const PropagatorSet &ps, std::size_t j, std::size_t r) {
    Operator h = heisenberg(p.op(), ps, j, r);
    // Symmetrize to remove rounding drift before revalidation.
    h = 0.5 * (h + h.adjoint()).eval();
    return Projector(h);
}

}  // namespace chist

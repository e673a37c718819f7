#pragma once

#include <memory>
#include <vector>

#include "bhit/specfun.hpp"

namespace bhit {

/// N(nu): number of zeros of K_nu, all in the open left half-plane.
int count_k_zeros(const Index& nu);

/// Zeros of K_nu with residue-weight evaluation. Non-real zeros are listed
/// as (z, conj z) pairs, upper member first, ordered by decreasing imaginary
/// part of the upper member; a real zero (odd count) comes last.
class KZeroSet {
public:
    KZeroSet(Index nu, std::vector<cplx> zeros);

    const Index& nu() const { return nu_; }
    int count() const { return static_cast<int>(zeros_.size()); }
    const std::vector<cplx>& zeros() const { return zeros_; }

    /// w_j = K_nu(alpha z_j) / (z_j K_{nu+1}(z_j)), orders taken as |nu|.
    std::vector<cplx> residue_weights(double alpha) const;

private:
    Index nu_;
    std::vector<cplx> zeros_;
};

/// Locate all zeros of K_nu. `tol` bounds the final Newton step relative to |z|.
KZeroSet find_k_zeros(const Index& nu, double tol = 1e-13);

/// Memoized find_k_zeros keyed by |nu|; safe for concurrent callers, and each
/// key is computed once.
std::shared_ptr<const KZeroSet> cached_k_zeros(double nu);

/// Positive zeros of J_nu in increasing order, extended on demand.
/// Extension mutates the table; share across threads only behind external
/// synchronization.
class JZeroTable {
public:
    explicit JZeroTable(double nu);

    double nu() const { return nu_; }
    /// k-th zero, k >= 1.
    double zero(int k);
    /// J_{nu+1} at the k-th zero.
    double j_next_at(int k);
    int size() const { return static_cast<int>(zeros_.size()); }
    void extend_to(int k_max);
    const std::vector<double>& zeros() const { return zeros_; }

private:
    double nu_;
    std::vector<double> zeros_;
    std::vector<double> j_next_;
};

JZeroTable find_j_zeros(double nu, int k_max);

}  // namespace bhit

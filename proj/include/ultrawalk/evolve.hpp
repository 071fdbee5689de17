#pragma once

// Exact time evolution of the coined master equation on a finite lattice.
//
// One step maps
//   psi+_{t+1}(x) = [C_{x-1} psi_t(x-1)]^+     (upper row, arriving from the left)
//   psi-_{t+1}(x) = [C_{x+1} psi_t(x+1)]^-     (lower row, arriving from the right)
// i.e. the propagator A_x = S^A C_x, B_x = S^B C_x with the projector shifts.
// Amplitudes are densities for the stochastic coin and wave amplitudes for
// the unitary coin.  With absorbing walls the weight arriving at either end
// site is accumulated and the wall amplitude cleared, so nothing flows back.

#include <cstdint>
#include <vector>

#include "ultrawalk/hierarchy.hpp"

namespace ultrawalk {

enum class Boundary { open, absorbing };

struct Lattice {
    std::int64_t x_min = 0;
    std::int64_t x_max = 0;
    std::size_t size() const { return static_cast<std::size_t>(x_max - x_min + 1); }
    bool contains(std::int64_t x) const { return x >= x_min && x <= x_max; }
};

// Symmetric open lattice [-(2^L - 1), 2^L - 1] with L chosen to hold t_max steps.
int open_truncation_level(std::int64_t t_max);
Lattice open_lattice(int truncation_level);

Vec2c default_ic(Flavor flavor);

struct WalkState {
    Flavor flavor = Flavor::unitary;
    Lattice lattice;
    Boundary boundary = Boundary::open;
    std::vector<Vec2c> amplitudes; // index = x - lattice.x_min
    std::int64_t t = 0;
    std::int64_t x0 = 0;
    double absorbed_left = 0.0;
    double absorbed_right = 0.0;
    // Index range that may hold nonzero amplitudes.
    std::size_t support_lo = 0;
    std::size_t support_hi = 0;

    const Vec2c& at(std::int64_t x) const {
        return amplitudes[static_cast<std::size_t>(x - lattice.x_min)];
    }
};

double site_density(Flavor flavor, const Vec2c& psi);
// Weight still on the lattice.
double interior_weight(const WalkState& s);
// Interior weight plus everything absorbed; 1 for a valid state.
double total_norm(const WalkState& s);

WalkState init_point(std::int64_t x0, Vec2c psi_ic, Flavor flavor, Lattice lattice,
                     Boundary boundary);

// Precomputed coin field for one (hierarchy, lattice) pair.  Reusable across
// any number of states on that lattice.
class Evolver {
public:
    Evolver(const CoinHierarchy& h, int truncation_level, Lattice lattice, Boundary boundary);

    void advance(WalkState& s) const;
    const Lattice& lattice() const { return lattice_; }

private:
    struct RealCoin {
        double c00, c01, c10, c11;
    };
    Lattice lattice_;
    Boundary boundary_;
    Flavor flavor_;
    std::vector<RealCoin> coins_;
    mutable std::vector<Vec2c> scratch_;
};

WalkState step(const WalkState& s, const CoinHierarchy& h, int truncation_level);

struct PdfSnapshot {
    std::int64_t t = 0;
    std::int64_t x0 = 0;
    std::int64_t x_min = 0;
    std::vector<double> rho;
    std::vector<Vec2c> psi;
    double mean = 0.0; // sum (x - x0) rho
    double msd = 0.0;  // sum (x - x0)^2 rho
    double norm = 0.0; // interior weight plus absorbed weight
};

PdfSnapshot snapshot(const WalkState& s);

// Steps until t_max, recording snapshots at the requested times (any order,
// each within [s.t, t_max]).
std::vector<PdfSnapshot> evolve(WalkState s, const CoinHierarchy& h, int truncation_level,
                                std::int64_t t_max, std::vector<std::int64_t> sample_times);

struct AbsorptionRecord {
    std::vector<std::int64_t> times;
    std::vector<double> cumulative_left;
    std::vector<double> cumulative_right;
    std::vector<double> interior;
    bool converged = false;
};

// Walls at 0 and 2^l, start at 2^(l-1).  Runs until the interior weight
// drops below tail_tol or t_max is reached.  Rows are recorded every
// record_stride steps (0 picks a stride giving at most ~16k rows) plus the
// final step.
AbsorptionRecord run_absorbing(int level, const CoinHierarchy& h, Vec2c psi_ic,
                               std::int64_t t_max, double tail_tol,
                               std::int64_t record_stride = 0);

} // namespace ultrawalk

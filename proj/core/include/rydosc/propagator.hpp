#pragma once

#include <functional>
#include <vector>

#include "rydosc/fock.hpp"

namespace rydosc {

enum class ResonanceMode { single_phonon, two_phonon };

/// One atomic flyby, fully characterised by the resonance mode, the
/// integrated coupling strength (G or G2) and the prepared atom state.
struct PassageChannel {
    ResonanceMode mode = ResonanceMode::two_phonon;
    double coupling = 0.0; // integrated G (real for the linear flyby)
    AtomState atom;
};

/// Exact single-passage unitary on (2-level atom) x (Fock space),
/// atom-major ordering with the energy-donating level (|p> or |s'>) first.
/// Blocks are 2x2 rotations by Theta_n = sqrt(n+1) G (single-phonon,
/// acting on {|p,n>, |s,n+1>}) or Theta_{n,2} = sqrt((n+1)(n+2)) G2
/// (two-phonon, acting on {|s',n>, |s,n+2>}); basis states outside any
/// block are fixed points. Blocks that would reach past the truncation
/// boundary are left as identity; the tail-population guard catches any
/// state that actually gets there.
Matrix propagator_matrix(const PassageChannel& channel, const FockSpace& space);

/// Precomputed passage channel: builds the propagator once per
/// (mode, G, N) and reuses it for every application.
class Passage {
public:
    Passage(const PassageChannel& channel, const FockSpace& space);

    /// Tr_a[ U (rho_a x rho_osc) U^dag ]. Output is hermitized and
    /// checked against the truncation guard.
    DensityMatrix apply(const DensityMatrix& rho) const;

    const Matrix& unitary() const { return unitary_; }
    const PassageChannel& channel() const { return channel_; }

private:
    PassageChannel channel_;
    FockSpace space_;
    Matrix unitary_;
    // Kraus operators of the trace-over-atom map, one per atomic readout
    // level: rho' = sum_c K_c rho K_c^dag.
    Matrix kraus_upper_, kraus_lower_;
};

/// Single application without an explicit Passage object.
DensityMatrix apply_passage(const PassageChannel& channel, const DensityMatrix& rho);

/// Callback invoked after each passage; may transform the state (for
/// interleaved bath evolution between atoms).
using PassageHook = std::function<DensityMatrix(int k, const DensityMatrix&)>;

struct PassageTrajectory {
    std::vector<DensityMatrix> states; // states[k] after k passages; states[0] = rho0
};

/// k-fold composition of apply_passage, returning the full trajectory.
PassageTrajectory iterate_passages(const PassageChannel& channel,
                                   const DensityMatrix& rho0, int k,
                                   const PassageHook& between = nullptr);

/// Choi matrix of the channel on N^2 x N^2, for complete-positivity checks.
Matrix choi_matrix(const PassageChannel& channel, const FockSpace& space);

} // namespace rydosc

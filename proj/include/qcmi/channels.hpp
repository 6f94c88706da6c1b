#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "qcmi/linalg.hpp"
#include "qcmi/rng.hpp"
#include "qcmi/states.hpp"

namespace qcmi {

inline constexpr double kChoiPsdTolerance = 1e-9;
inline constexpr double kTracePreservingTolerance = 1e-8;

/// Completely positive trace-preserving map in Choi form.
///
/// The Choi matrix lives on input (x) output and is normalized so that
/// tr_out(choi) = I_in:  choi = sum_ij |i><j| (x) L(|i><j|).
/// Applying the channel is then L(X) = sum_ij X_ij choi_ij, with choi_ij the
/// (i, j) output block, and needs no dimension factor.
class Channel {
 public:
  Channel(ComplexMatrix choi, SubsystemList input, SubsystemList output);

  const ComplexMatrix& choi() const { return choi_; }
  const SubsystemList& input() const { return input_; }
  const SubsystemList& output() const { return output_; }
  std::size_t input_dim() const { return total_dim(input_); }
  std::size_t output_dim() const { return total_dim(output_); }

  /// L(X) for an arbitrary operator X on the input space.
  ComplexMatrix operator()(const ComplexMatrix& x) const;

 private:
  ComplexMatrix choi_;
  SubsystemList input_;
  SubsystemList output_;
};

/// Minimum Choi eigenvalue and max-abs deviation of tr_out(choi) from I_in.
struct CptpDiagnostics {
  double min_choi_eigenvalue = 0.0;
  double trace_deviation = 0.0;
  bool ok() const {
    return min_choi_eigenvalue >= -kChoiPsdTolerance &&
           trace_deviation <= kTracePreservingTolerance;
  }
};

CptpDiagnostics cptp_diagnostics(const ComplexMatrix& choi, std::size_t input_dim,
                                 std::size_t output_dim);

/// Stinespring isometry V: input -> output (x) environment, stored as stacked
/// Kraus operators: row e * d_out + o holds K_e(o, :).
class Isometry {
 public:
  /// Rejects deviations ||V^dagger V - I||_max above 1e-6; smaller deviations
  /// are removed by polar re-orthonormalization.
  Isometry(ComplexMatrix v, std::size_t output_dim, std::size_t env_dim);

  const ComplexMatrix& matrix() const { return v_; }
  std::size_t input_dim() const { return static_cast<std::size_t>(v_.cols()); }
  std::size_t output_dim() const { return output_dim_; }
  std::size_t env_dim() const { return env_dim_; }
  /// K_e, a d_out x d_in block.
  ComplexMatrix kraus(std::size_t e) const;

 private:
  ComplexMatrix v_;
  std::size_t output_dim_;
  std::size_t env_dim_;
};

/// Nearest isometry (polar factor) of a full-column-rank matrix.
ComplexMatrix orthonormalize(const ComplexMatrix& v);

/// (L (x) id)(s) with the channel acting on the subsystems `on`, listed in
/// the channel's input order. The output subsystems take the place of the
/// first acted-on subsystem; the rest keep their order.
MultipartiteState apply(const Channel& ch, const MultipartiteState& s,
                        const std::vector<std::string>& on);

/// Matrix-level (L (x) id_rest)(m) for m on input (x) rest.
ComplexMatrix apply_on_leading(const Channel& ch, const ComplexMatrix& m, std::size_t rest_dim);

/// second after first.
Channel compose(const Channel& second, const Channel& first);

Channel identity_channel(SubsystemList subsystems);

/// Constant channel onto the maximally mixed state of `output`.
Channel depolarizing(SubsystemList input, SubsystemList output);
Channel depolarizing(SubsystemList subsystems);

/// How the transpose channel acts off the support of rho_B.
enum class TransposeCompletion {
  kAttachState,  // add tr[(I - P_B) pi] rho_BC
  kMaximallyMixed,  // add tr[(I - P_B) pi] I_BC / d_BC
};

/// T(pi) = rho_BC^1/2 (rho_B^-1/2 pi rho_B^-1/2 (x) I_C) rho_BC^1/2, completed to
/// a trace-preserving map off the support of rho_B. Input {b}, output {b, c}.
Channel transpose_channel(const MultipartiteState& rho_bc, const std::string& b = "B",
                          const std::string& c = "C",
                          TransposeCompletion completion = TransposeCompletion::kAttachState);

/// tr[(I - P_B) pi] for the transpose channel's support projector of rho_B.
double off_support_weight(const MultipartiteState& rho_b, const ComplexMatrix& pi);

Channel stinespring_to_channel(const Isometry& v, SubsystemList input, SubsystemList output);

/// Isometry realizing `ch` with `env_dim` Kraus slots (>= Kraus rank).
Isometry stinespring_of(const Channel& ch, std::size_t env_dim);

/// Kraus rank at the default relative cutoff.
std::size_t kraus_rank(const Channel& ch);

/// Haar-random Stinespring isometry pushed through stinespring_to_channel.
/// env_dim 0 selects d_in * d_out.
Channel random_channel(SubsystemList input, SubsystemList output, std::size_t env_dim,
                       SeededRng& rng);

/// w * ch1 + (1 - w) * ch2.
Channel mix(const Channel& ch1, const Channel& ch2, double w);

/// pi -> pi (x) state, attaching `state` after the input.
Channel attach_channel(SubsystemList input, const MultipartiteState& state);

}  // namespace qcmi

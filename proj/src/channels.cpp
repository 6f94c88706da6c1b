#include "qcmi/channels.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qcmi {

namespace {

void require_subsystems(const SubsystemList& list, const char* what) {
  if (list.empty()) throw NumericError(std::string(what) + ": subsystem list is empty");
  std::set<std::string> seen;
  for (const auto& s : list) {
    if (s.dim == 0) throw NumericError(std::string(what) + ": zero dimension");
    if (!seen.insert(s.label).second) {
      throw NumericError(std::string(what) + ": duplicate label '" + s.label + "'");
    }
  }
}

ComplexMatrix identity_choi(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  ComplexVector omega = ComplexVector::Zero(n * n);
  for (Eigen::Index i = 0; i < n; ++i) omega(i * n + i) = 1.0;
  return omega * omega.adjoint();
}

}  // namespace

CptpDiagnostics cptp_diagnostics(const ComplexMatrix& choi, std::size_t input_dim,
                                 std::size_t output_dim) {
  CptpDiagnostics diag;
  diag.min_choi_eigenvalue = min_eigenvalue(choi);
  const std::vector<std::size_t> dims{input_dim, output_dim};
  const std::vector<std::size_t> keep{0};
  const ComplexMatrix reduced = ops::partial_trace(choi, dims, keep);
  const auto n = static_cast<Eigen::Index>(input_dim);
  diag.trace_deviation = (reduced - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  return diag;
}

Channel::Channel(ComplexMatrix choi, SubsystemList input, SubsystemList output)
    : input_(std::move(input)), output_(std::move(output)) {
  require_subsystems(input_, "Channel input");
  require_subsystems(output_, "Channel output");
  const std::size_t n = input_dim() * output_dim();
  if (choi.rows() != choi.cols() || static_cast<std::size_t>(choi.rows()) != n) {
    std::ostringstream os;
    os << "Channel: Choi matrix is " << choi.rows() << "x" << choi.cols() << ", expected " << n
       << "x" << n;
    throw NumericError(os.str());
  }
  if (!choi.allFinite()) throw NumericError("Channel: Choi matrix has non-finite entries");
  choi_ = symmetrized(choi);
  const auto diag = cptp_diagnostics(choi_, input_dim(), output_dim());
  if (!diag.ok()) {
    std::ostringstream os;
    os << "Channel: not CPTP (min Choi eigenvalue " << diag.min_choi_eigenvalue
       << ", trace deviation " << diag.trace_deviation << ")";
    throw NumericError(os.str());
  }
}

ComplexMatrix Channel::operator()(const ComplexMatrix& x) const {
  const auto din = static_cast<Eigen::Index>(input_dim());
  const auto dout = static_cast<Eigen::Index>(output_dim());
  if (x.rows() != din || x.cols() != din) throw NumericError("Channel: input shape mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(dout, dout);
  for (Eigen::Index i = 0; i < din; ++i) {
    for (Eigen::Index j = 0; j < din; ++j) {
      if (x(i, j) != Complex(0.0)) out += x(i, j) * choi_.block(i * dout, j * dout, dout, dout);
    }
  }
  return out;
}

ComplexMatrix apply_on_leading(const Channel& ch, const ComplexMatrix& m, std::size_t rest_dim) {
  const auto din = static_cast<Eigen::Index>(ch.input_dim());
  const auto dout = static_cast<Eigen::Index>(ch.output_dim());
  const auto r = static_cast<Eigen::Index>(rest_dim);
  if (m.rows() != din * r || m.cols() != din * r) {
    throw NumericError("apply: state dimension does not match channel input");
  }
  ComplexMatrix out = ComplexMatrix::Zero(dout * r, dout * r);
  for (Eigen::Index i = 0; i < din; ++i) {
    for (Eigen::Index j = 0; j < din; ++j) {
      const auto rest_block = m.block(i * r, j * r, r, r);
      const auto choi_block = ch.choi().block(i * dout, j * dout, dout, dout);
      for (Eigen::Index a = 0; a < dout; ++a) {
        for (Eigen::Index b = 0; b < dout; ++b) {
          out.block(a * r, b * r, r, r) += choi_block(a, b) * rest_block;
        }
      }
    }
  }
  return out;
}

MultipartiteState apply(const Channel& ch, const MultipartiteState& s,
                        const std::vector<std::string>& on) {
  if (on.size() != ch.input().size()) {
    throw NumericError("apply: acted-on labels do not match the channel input");
  }
  std::vector<std::size_t> on_idx;
  for (std::size_t k = 0; k < on.size(); ++k) {
    const std::size_t i = index_of(s.subsystems(), on[k]);
    if (std::find(on_idx.begin(), on_idx.end(), i) != on_idx.end()) {
      throw NumericError("apply: repeated label '" + on[k] + "'");
    }
    if (s.subsystems()[i].dim != ch.input()[k].dim) {
      throw NumericError("apply: dimension of '" + on[k] + "' does not match the channel input");
    }
    on_idx.push_back(i);
  }
  std::vector<std::size_t> rest_idx;
  for (std::size_t i = 0; i < s.subsystems().size(); ++i) {
    if (std::find(on_idx.begin(), on_idx.end(), i) == on_idx.end()) rest_idx.push_back(i);
  }
  std::vector<std::size_t> order = on_idx;
  order.insert(order.end(), rest_idx.begin(), rest_idx.end());
  const auto dims = s.dims();
  const ComplexMatrix leading = ops::permute(s.matrix(), dims, order);
  std::size_t rest_dim = 1;
  for (std::size_t i : rest_idx) rest_dim *= dims[i];
  ComplexMatrix out = apply_on_leading(ch, leading, rest_dim);

  SubsystemList out_subs = ch.output();
  for (std::size_t i : rest_idx) {
    const auto& sub = s.subsystems()[i];
    for (const auto& o : ch.output()) {
      if (o.label == sub.label) {
        throw NumericError("apply: channel output label '" + o.label +
                           "' collides with an untouched subsystem");
      }
    }
    out_subs.push_back(sub);
  }
  // Put the outputs where the first acted-on subsystem was.
  const std::size_t anchor = on_idx.front();
  const auto before = static_cast<std::size_t>(
      std::count_if(rest_idx.begin(), rest_idx.end(), [&](std::size_t i) { return i < anchor; }));
  const std::size_t n_out = ch.output().size();
  std::vector<std::size_t> final_order;
  for (std::size_t k = 0; k < before; ++k) final_order.push_back(n_out + k);
  for (std::size_t k = 0; k < n_out; ++k) final_order.push_back(k);
  for (std::size_t k = before; k < rest_idx.size(); ++k) final_order.push_back(n_out + k);

  const auto out_dims = dims_of(out_subs);
  SubsystemList ordered;
  for (std::size_t k : final_order) ordered.push_back(out_subs[k]);
  return MultipartiteState(ops::permute(out, out_dims, final_order), std::move(ordered));
}

Channel compose(const Channel& second, const Channel& first) {
  if (dims_of(first.output()) != dims_of(second.input())) {
    throw NumericError("compose: output of the first channel does not match the second's input");
  }
  const auto din = static_cast<Eigen::Index>(first.input_dim());
  const auto dmid = static_cast<Eigen::Index>(first.output_dim());
  const auto dout = static_cast<Eigen::Index>(second.output_dim());
  ComplexMatrix choi(din * dout, din * dout);
  for (Eigen::Index i = 0; i < din; ++i) {
    for (Eigen::Index j = 0; j < din; ++j) {
      choi.block(i * dout, j * dout, dout, dout) =
          second(first.choi().block(i * dmid, j * dmid, dmid, dmid));
    }
  }
  return Channel(std::move(choi), first.input(), second.output());
}

Channel identity_channel(SubsystemList subsystems) {
  const std::size_t d = total_dim(subsystems);
  return Channel(identity_choi(d), subsystems, subsystems);
}

Channel depolarizing(SubsystemList input, SubsystemList output) {
  const auto din = static_cast<Eigen::Index>(total_dim(input));
  const auto dout = static_cast<Eigen::Index>(total_dim(output));
  ComplexMatrix choi = ComplexMatrix::Identity(din * dout, din * dout) / static_cast<double>(dout);
  return Channel(std::move(choi), std::move(input), std::move(output));
}

Channel depolarizing(SubsystemList subsystems) { return depolarizing(subsystems, subsystems); }

Channel transpose_channel(const MultipartiteState& rho_bc, const std::string& b,
                          const std::string& c, TransposeCompletion completion) {
  if (rho_bc.subsystems().size() != 2 || !rho_bc.has(b) || !rho_bc.has(c) || b == c) {
    throw NumericError("transpose_channel: expected a bipartite state on '" + b + "' and '" + c +
                       "'");
  }
  const MultipartiteState bc = permute(rho_bc, {b, c});
  const auto db = static_cast<Eigen::Index>(bc.dim_of(b));
  const auto dc = static_cast<Eigen::Index>(bc.dim_of(c));
  const Eigen::Index dout = db * dc;

  const MultipartiteState rho_b = partial_trace(bc, {b});
  const auto b_spec = eigh(rho_b.matrix());
  const double cutoff = b_spec.default_cutoff();
  const ComplexMatrix inv_sqrt_b =
      matrix_function(b_spec, [](double x) { return 1.0 / std::sqrt(x); }, cutoff);
  const ComplexMatrix off_support =
      ComplexMatrix::Identity(db, db) - support_projector(b_spec, cutoff);

  const ComplexMatrix k =
      sqrtm_psd(bc.matrix()) * kron(inv_sqrt_b, ComplexMatrix::Identity(dc, dc));
  const ComplexMatrix fill = completion == TransposeCompletion::kAttachState
                                 ? bc.matrix()
                                 : ComplexMatrix(ComplexMatrix::Identity(dout, dout) /
                                                 static_cast<double>(dout));

  ComplexMatrix choi = ComplexMatrix::Zero(db * dout, db * dout);
  for (Eigen::Index i = 0; i < db; ++i) {
    for (Eigen::Index j = 0; j < db; ++j) {
      auto block = choi.block(i * dout, j * dout, dout, dout);
      for (Eigen::Index x = 0; x < dc; ++x) {
        block += k.col(i * dc + x) * k.col(j * dc + x).adjoint();
      }
      block += off_support(j, i) * fill;
    }
  }
  SubsystemList input{bc.subsystems()[0]};
  return Channel(std::move(choi), std::move(input), bc.subsystems());
}

double off_support_weight(const MultipartiteState& rho_b, const ComplexMatrix& pi) {
  const auto spec = eigh(rho_b.matrix());
  const auto d = static_cast<Eigen::Index>(rho_b.dim());
  const ComplexMatrix off =
      ComplexMatrix::Identity(d, d) - support_projector(spec, spec.default_cutoff());
  return (off * pi).trace().real();
}

ComplexMatrix orthonormalize(const ComplexMatrix& v) {
  Eigen::JacobiSVD<ComplexMatrix> svd(v, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Isometry::Isometry(ComplexMatrix v, std::size_t output_dim, std::size_t env_dim)
    : v_(std::move(v)), output_dim_(output_dim), env_dim_(env_dim) {
  if (static_cast<std::size_t>(v_.rows()) != output_dim_ * env_dim_ || v_.cols() == 0) {
    std::ostringstream os;
    os << "Isometry: matrix is " << v_.rows() << "x" << v_.cols() << ", expected "
       << output_dim_ * env_dim_ << " rows";
    throw NumericError(os.str());
  }
  const auto n = v_.cols();
  const double dev = (v_.adjoint() * v_ - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (!(dev <= 1e-6)) {
    std::ostringstream os;
    os << "Isometry: V^dagger V deviates from the identity by " << dev;
    throw NumericError(os.str());
  }
  if (dev > 1e-12) v_ = orthonormalize(v_);
}

ComplexMatrix Isometry::kraus(std::size_t e) const {
  const auto dout = static_cast<Eigen::Index>(output_dim_);
  return v_.block(static_cast<Eigen::Index>(e) * dout, 0, dout, v_.cols());
}

Channel stinespring_to_channel(const Isometry& v, SubsystemList input, SubsystemList output) {
  if (total_dim(input) != v.input_dim() || total_dim(output) != v.output_dim()) {
    throw NumericError("stinespring_to_channel: subsystem dimensions do not match the isometry");
  }
  const auto din = static_cast<Eigen::Index>(v.input_dim());
  const auto dout = static_cast<Eigen::Index>(v.output_dim());
  ComplexMatrix choi = ComplexMatrix::Zero(din * dout, din * dout);
  ComplexVector vec(din * dout);
  for (std::size_t e = 0; e < v.env_dim(); ++e) {
    const ComplexMatrix k = v.kraus(e);
    for (Eigen::Index i = 0; i < din; ++i) {
      for (Eigen::Index o = 0; o < dout; ++o) vec(i * dout + o) = k(o, i);
    }
    choi.noalias() += vec * vec.adjoint();
  }
  return Channel(std::move(choi), std::move(input), std::move(output));
}

std::size_t kraus_rank(const Channel& ch) {
  const auto spec = eigh(ch.choi());
  return static_cast<std::size_t>(support_rank(spec, spec.default_cutoff()));
}

Isometry stinespring_of(const Channel& ch, std::size_t env_dim) {
  const auto spec = eigh(ch.choi());
  const double cutoff = spec.default_cutoff();
  const auto din = static_cast<Eigen::Index>(ch.input_dim());
  const auto dout = static_cast<Eigen::Index>(ch.output_dim());
  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = spec.size(); k-- > 0;) {
    if (spec.eigenvalues(k) > cutoff) kept.push_back(k);
  }
  if (kept.size() > env_dim) {
    std::ostringstream os;
    os << "stinespring_of: Kraus rank " << kept.size() << " exceeds environment dimension "
       << env_dim;
    throw NumericError(os.str());
  }
  ComplexMatrix v = ComplexMatrix::Zero(static_cast<Eigen::Index>(env_dim) * dout, din);
  for (std::size_t e = 0; e < kept.size(); ++e) {
    const Eigen::Index k = kept[e];
    const double w = std::sqrt(spec.eigenvalues(k));
    for (Eigen::Index i = 0; i < din; ++i) {
      for (Eigen::Index o = 0; o < dout; ++o) {
        v(static_cast<Eigen::Index>(e) * dout + o, i) = w * spec.eigenvectors(i * dout + o, k);
      }
    }
  }
  return Isometry(std::move(v), ch.output_dim(), env_dim);
}

Channel random_channel(SubsystemList input, SubsystemList output, std::size_t env_dim,
                       SeededRng& rng) {
  const std::size_t din = total_dim(input);
  const std::size_t dout = total_dim(output);
  if (env_dim == 0) env_dim = din * dout;
  if (dout * env_dim < din) throw NumericError("random_channel: d_out * env_dim must be >= d_in");
  Isometry v(haar_isometry(dout * env_dim, din, rng), dout, env_dim);
  return stinespring_to_channel(v, std::move(input), std::move(output));
}

Channel mix(const Channel& ch1, const Channel& ch2, double w) {
  if (!(w >= 0.0 && w <= 1.0)) throw NumericError("mix: weight must lie in [0, 1]");
  if (dims_of(ch1.input()) != dims_of(ch2.input()) ||
      dims_of(ch1.output()) != dims_of(ch2.output())) {
    throw NumericError("mix: channels have different input or output dimensions");
  }
  return Channel(w * ch1.choi() + (1.0 - w) * ch2.choi(), ch1.input(), ch1.output());
}

Channel attach_channel(SubsystemList input, const MultipartiteState& state) {
  SubsystemList output = input;
  for (const auto& s : state.subsystems()) {
    for (const auto& in : input) {
      if (in.label == s.label) {
        throw NumericError("attach_channel: label collision on '" + s.label + "'");
      }
    }
    output.push_back(s);
  }
  ComplexMatrix choi = kron(identity_choi(total_dim(input)), state.matrix());
  return Channel(std::move(choi), std::move(input), std::move(output));
}

}  // namespace qcmi

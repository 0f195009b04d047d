#include "plab/pointer_id.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "plab/textio.hpp"

namespace plab {

RdmTrajectory track_branch(std::vector<RdmSample> samples)
{
    if (samples.empty())
        throw ConfigError("track_branch: empty trajectory");
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (samples[i].step <= samples[i - 1].step)
            throw ConfigError("track_branch: sample steps must be strictly increasing");

    RdmTrajectory rt;
    rt.branch.reserve(samples.size());
    rt.branch_label.reserve(samples.size());

    const auto first = std::find_if(samples.begin(), samples.end(),
                                    [](const RdmSample& s) { return !s.rho.degenerate; });
    if (first == samples.end())
        throw NumericalError("no trackable branch: every RDM sample is degenerate");

    // Samples before the first resolvable one inherit its top eigenvector.
    Vec2 prev = first->rho.eigenvectors[0];
    int prev_label = 0;
    double prev_eig = first->rho.eigenvalues[0];
    for (const auto& s : samples) {
        if (s.rho.degenerate) {
            ++rt.degenerate_samples;
            rt.branch.push_back(prev);
            rt.branch_label.push_back(prev_label);
            continue;
        }
        const double o0 = std::norm(prev.dot(s.rho.eigenvectors[0]));
        const double o1 = std::norm(prev.dot(s.rho.eigenvectors[1]));
        int label = (o0 >= o1) ? 0 : 1;
        if (label != prev_label && !rt.branch.empty() &&
            std::abs(s.rho.eigenvalues[label] - prev_eig) > kMaxSwapJump) {
            label = prev_label;
            ++rt.held_swaps;
        }
        if (!rt.branch.empty() && label != prev_label)
            rt.crossings.push_back(s.step);
        prev = s.rho.eigenvectors[label];
        prev_label = label;
        prev_eig = s.rho.eigenvalues[label];
        rt.branch.push_back(prev);
        rt.branch_label.push_back(label);
    }
    rt.samples = std::move(samples);
    return rt;
}

PointerCandidate pointer_candidate(const RdmTrajectory& rt, const Window& w)
{
    if (w.t_b < w.t_a)
        throw ConfigError("pointer_candidate: window end precedes start");
    Mat2 acc = Mat2::Zero();
    std::size_t count = 0;
    for (std::size_t i = 0; i < rt.samples.size(); ++i) {
        if (!w.contains(rt.samples[i].step))
            continue;
        acc += rt.branch[i] * rt.branch[i].adjoint();
        ++count;
    }
    if (count < kMinWindowSamples)
        throw ConfigError("pointer_candidate: window holds " + std::to_string(count) + " samples, need at least " +
                          std::to_string(kMinWindowSamples));

    PointerCandidate pc;
    pc.rho_bar = acc / static_cast<double>(count);
    pc.rho_bar = 0.5 * (pc.rho_bar + pc.rho_bar.adjoint()).eval();
    pc.window = w;
    pc.n_samples = count;
    const auto eig = eig_2x2_hermitian(pc.rho_bar);
    pc.rho_bar_eigenvalues = eig.values;
    pc.tilde_0 = eig.vectors[0];
    pc.tilde_1 = eig.vectors[1];
    if (eig.values[0] - eig.values[1] < kCandidateGap)
        throw CandidateUnresolved("pointer candidate unresolved: rho_bar eigenvalue gap " +
                                  fmt17(eig.values[0] - eig.values[1]));
    return pc;
}

double paired_distance(const Vec2& branch, const Vec2& eta0)
{
    const double ov = std::norm(branch.dot(eta0));
    return std::clamp(std::min(ov, 1.0 - ov), 0.0, 0.5);
}

double avg_distance(const RdmTrajectory& rt, const Vec2& eta0, const Window& w)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < rt.samples.size(); ++i) {
        if (!w.contains(rt.samples[i].step))
            continue;
        sum += paired_distance(rt.branch[i], eta0);
        ++count;
    }
    if (count == 0)
        throw ConfigError("avg_distance: no samples in window");
    return sum / static_cast<double>(count);
}

double avg_distance(const RdmTrajectory& rt, const BasisPair& basis, const Window& w)
{
    return avg_distance(rt, basis.alpha(), w);
}

double distance_closed_form(const Rdm2& rho, const Vec2& alpha, const Vec2& beta)
{
    const double off2 = std::norm(rho.element(alpha, beta));
    const double dr = std::abs(rho.element(alpha, alpha).real() - rho.element(beta, beta).real());
    if (off2 == 0.0)
        return 0.0;
    const double s = dr + std::sqrt(dr * dr + 4.0 * off2);
    return off2 / (0.25 * s * s + off2);
}

double distance_closed_form(const Rdm2& rho, const BasisPair& basis)
{
    return distance_closed_form(rho, basis.alpha(), basis.beta());
}

double angle_theta(const Vec2& reference, const Vec2& target)
{
    const double ov = std::abs(reference.dot(target)) / (reference.norm() * target.norm());
    return std::acos(std::clamp(ov, 0.0, 1.0));
}

std::vector<OffDiagSample> offdiag_trace(const std::vector<RdmSample>& samples, const Vec2& alpha,
                                         const Vec2& beta)
{
    std::vector<OffDiagSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        const double raa = s.rho.element(alpha, alpha).real();
        const double rbb = s.rho.element(beta, beta).real();
        out.push_back({s.step, std::abs(s.rho.element(alpha, beta)), std::abs(raa - rbb)});
    }
    return out;
}

double window_mean_offdiag(const std::vector<OffDiagSample>& trace, const Window& w)
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& s : trace)
        if (w.contains(s.step)) {
            sum += s.offdiag_abs;
            ++count;
        }
    if (count == 0)
        throw ConfigError("window_mean_offdiag: no samples in window");
    return sum / static_cast<double>(count);
}

std::optional<std::uint64_t> decay_settle_step(const std::vector<OffDiagSample>& trace, const Window& w,
                                               double fraction, std::size_t smoothing)
{
    if (trace.empty() || smoothing == 0)
        return std::nullopt;
    const double plateau = window_mean_offdiag(trace, w);
    const double initial = trace.front().offdiag_abs;
    if (initial <= plateau)
        return std::nullopt;
    const double threshold = plateau + fraction * (initial - plateau);
    double run = 0.0;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        run += trace[i].offdiag_abs;
        if (i >= smoothing)
            run -= trace[i - smoothing].offdiag_abs;
        const std::size_t width = std::min(i + 1, smoothing);
        if (i + 1 >= smoothing && run / static_cast<double>(width) < threshold)
            return trace[i].step;
    }
    return std::nullopt;
}

void write_trajectory_csv(std::ostream& os, const RdmTrajectory& rt)
{
    os << "step,rho00,re_rho01,im_rho01,rho11,eig0,eig1,branch_re0,branch_im0,branch_re1,branch_im1\n";
    for (std::size_t i = 0; i < rt.samples.size(); ++i) {
        const auto& s = rt.samples[i];
        const auto& v = rt.branch[i];
        os << s.step << ',' << fmt17(s.rho.m00) << ',' << fmt17(s.rho.m01.real()) << ','
           << fmt17(s.rho.m01.imag()) << ',' << fmt17(s.rho.m11) << ',' << fmt17(s.rho.eigenvalues[0]) << ','
           << fmt17(s.rho.eigenvalues[1]) << ',' << fmt17(v(0).real()) << ',' << fmt17(v(0).imag()) << ','
           << fmt17(v(1).real()) << ',' << fmt17(v(1).imag()) << '\n';
    }
}

} // namespace plab

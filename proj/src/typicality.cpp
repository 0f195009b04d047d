#include "plab/typicality.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <json.hpp>

#include "plab/error.hpp"
#include "plab/pointer_id.hpp"

namespace plab::typicality {

void TypicalEnsembleSpec::validate() const
{
    if (n_env < 2)
        throw ConfigError("typicality: n_env must be >= 2");
    if (n_samples < 1)
        throw ConfigError("typicality: n_samples must be >= 1");
}

Rdm2 sample_typical_rdm(const TypicalEnsembleSpec& spec, std::uint64_t draw)
{
    spec.validate();
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed), static_cast<std::uint32_t>(spec.seed >> 32),
                      static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

    double naa = 0.0, nbb = 0.0;
    cplx ab{0.0, 0.0};
    for (std::uint64_t j = 0; j < spec.n_env; ++j) {
        const double ar = gauss(rng), ai = gauss(rng);
        const double br = gauss(rng), bi = gauss(rng);
        const cplx ca(ar, ai), cb(br, bi);
        naa += std::norm(ca);
        nbb += std::norm(cb);
        ab += ca * std::conj(cb);
    }
    const double total = naa + nbb;
    return Rdm2::from_elements(naa / total, nbb / total, ab / total);
}

namespace {

struct DrawStats {
    double off2; // |rho_ab|^2
    double dr2;  // (rho_aa - rho_bb)^2
    double d;
};

double mean(const std::vector<double>& x)
{
    double s = 0.0;
    for (double v : x)
        s += v;
    return s / static_cast<double>(x.size());
}

} // namespace

TypicalitySummary summarize(const TypicalEnsembleSpec& spec)
{
    spec.validate();
    const auto n = static_cast<std::ptrdiff_t>(spec.n_samples);
    std::vector<DrawStats> draws(spec.n_samples);
    const Vec2 alpha(1.0, 0.0), beta(0.0, 1.0);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const Rdm2 rho = sample_typical_rdm(spec, static_cast<std::uint64_t>(i));
        const double dr = rho.m00 - rho.m11;
        draws[i] = {std::norm(rho.m01), dr * dr, distance_closed_form(rho, alpha, beta)};
    }

    std::vector<double> off2, dr2, d;
    off2.reserve(draws.size());
    dr2.reserve(draws.size());
    d.reserve(draws.size());
    for (const auto& s : draws) {
        off2.push_back(s.off2);
        dr2.push_back(s.dr2);
        d.push_back(s.d);
    }

    TypicalitySummary out;
    out.spec = spec;
    const double ma = mean(off2), mb = mean(dr2), md = mean(d);
    out.ratio.value = ma / mb;
    out.avg_d.value = md;
    out.max_d = *std::max_element(d.begin(), d.end());
    out.min_d = *std::min_element(d.begin(), d.end());

    const double cnt = static_cast<double>(draws.size());
    if (draws.size() >= 2) {
        double vaa = 0.0, vbb = 0.0, vab = 0.0, vdd = 0.0;
        for (std::size_t i = 0; i < draws.size(); ++i) {
            vaa += (off2[i] - ma) * (off2[i] - ma);
            vbb += (dr2[i] - mb) * (dr2[i] - mb);
            vab += (off2[i] - ma) * (dr2[i] - mb);
            vdd += (d[i] - md) * (d[i] - md);
        }
        vaa /= cnt - 1.0;
        vbb /= cnt - 1.0;
        vab /= cnt - 1.0;
        vdd /= cnt - 1.0;
        // Delta method for a ratio of means.
        const double r = ma / mb;
        const double var_r = (vaa - 2.0 * r * vab + r * r * vbb) / (mb * mb * cnt);
        out.ratio.standard_error = std::sqrt(std::max(var_r, 0.0));
        out.avg_d.standard_error = std::sqrt(vdd / cnt);
    }
    return out;
}

Estimate estimate_ratio(const TypicalEnsembleSpec& spec)
{
    if (spec.n_samples < 100)
        throw ConfigError("estimate_ratio: need at least 100 samples");
    return summarize(spec).ratio;
}

Estimate estimate_avg_d(const TypicalEnsembleSpec& spec)
{
    if (spec.n_samples < 100)
        throw ConfigError("estimate_avg_d: need at least 100 samples");
    return summarize(spec).avg_d;
}

std::string report_json(const TypicalitySummary& s)
{
    nlohmann::ordered_json j;
    j["n_env"] = s.spec.n_env;
    j["n_samples"] = s.spec.n_samples;
    j["ratio"] = s.ratio.value;
    j["ratio_se"] = s.ratio.standard_error ? nlohmann::ordered_json(*s.ratio.standard_error) : nullptr;
    j["avg_d"] = s.avg_d.value;
    j["avg_d_se"] = s.avg_d.standard_error ? nlohmann::ordered_json(*s.avg_d.standard_error) : nullptr;
    j["seed"] = s.spec.seed;
    return j.dump(2) + "\n";
}

} // namespace plab::typicality

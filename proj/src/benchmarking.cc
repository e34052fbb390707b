// Copyright 2026 The cqbsim Authors
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

#include "cqbsim/benchmarking.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "cqbsim/errors.h"
#include "cqbsim/fit.h"
#include "cqbsim/parallel.h"
#include "cqbsim/rng.h"

namespace cqbsim {

using Eigen::VectorXd;

namespace {

// Stream offsets for the random draws of one run.
constexpr uint64_t kStreamSequenceB = 1ULL << 40;
constexpr uint64_t kStreamExecutor = 2ULL << 40;
constexpr uint64_t kStreamShots = 3ULL << 40;

uint64_t sequence_stream(size_t length_index, int index) {
    return (static_cast<uint64_t>(length_index) << 20) | static_cast<uint64_t>(index);
}

// A length-1 sequence is the recovery alone, which is then the identity.
int recovery_of(const std::vector<int> &seq) {
    return seq.empty() ? 1 : recovery_clifford(seq);
}

void check_populations(double a, double b, double leak) {
    const double tol = 1e-6;
    for (double p : {a, b, leak}) {
        if (!std::isfinite(p) || p < -tol || p > 1 + tol) {
            throw NumericError("executor returned a population outside [0, 1]", "populations");
        }
    }
    if (std::abs(a + b + leak - 1) > tol) {
        throw NumericError("executor returned non-normalized populations", "populations");
    }
}

// Multinomial counts over (rec, other, leak) from `shots` draws.
std::array<double, 3> sample_shots(double rec, double other, int shots, Rng &rng) {
    rec = std::clamp(rec, 0.0, 1.0);
    other = std::clamp(other, 0.0, 1.0 - rec);
    int n_rec = rng.binomial(shots, rec);
    double rest = 1 - rec;
    int n_other = rest > 0 ? rng.binomial(shots - n_rec, std::min(1.0, other / rest)) : 0;
    double s = static_cast<double>(shots);
    return {n_rec / s, n_other / s, (shots - n_rec - n_other) / s};
}

void mean_and_sem(const std::vector<double> &v, double *mean, double *sem) {
    double m = 0;
    for (double x : v) {
        m += x;
    }
    m /= static_cast<double>(v.size());
    double ss = 0;
    for (double x : v) {
        ss += (x - m) * (x - m);
    }
    *mean = m;
    *sem = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size())) : 0;
}

}  // namespace

const char *rb_mode_name(RBMode m) {
    switch (m) {
        case RBMode::Single:
            return "single";
        case RBMode::Simultaneous:
            return "simultaneous";
        case RBMode::Interleaved:
            return "interleaved";
    }
    return "single";
}

void RBConfig::validate() const {
    if (lengths.size() < 2) {
        throw ConfigError("RB needs at least 2 sequence lengths", "lengths");
    }
    for (size_t k = 0; k < lengths.size(); k++) {
        if (lengths[k] < 1 || (k > 0 && lengths[k] <= lengths[k - 1])) {
            throw ConfigError("RB lengths must be >= 1 and strictly increasing", "lengths");
        }
    }
    if (sequences_per_length < 10) {
        throw ConfigError("RB needs at least 10 sequences per length", "sequences_per_length");
    }
    if (shots < 0) {
        throw ConfigError("shots must be >= 0", "shots");
    }
    if (interleave_cz && mode != RBMode::Interleaved) {
        throw ConfigError("interleave_cz needs the interleaved mode", "interleave_cz");
    }
}

RBConfig rb_config_from_json(const Json &j) {
    RBConfig c;
    if (!j.contains("lengths") || !j["lengths"].is_array()) {
        throw ConfigError("missing array field lengths", "lengths");
    }
    c.lengths = j["lengths"].get<std::vector<int>>();
    c.sequences_per_length = j.value("sequences_per_length", 30);
    c.seed = j.value("seed", uint64_t{0});
    std::string mode = j.value("mode", std::string("single"));
    if (mode == "single") {
        c.mode = RBMode::Single;
    } else if (mode == "simultaneous") {
        c.mode = RBMode::Simultaneous;
    } else if (mode == "interleaved") {
        c.mode = RBMode::Interleaved;
    } else {
        throw ConfigError("unknown RB mode '" + mode + "'", "mode");
    }
    c.interleave_cz = j.value("interleave_cz", false);
    c.shots = j.value("shots", 0);
    c.fit_spam = j.value("fit_spam", false);
    c.workers = j.value("workers", 1);
    c.validate();
    return c;
}

Json rb_config_to_json(const RBConfig &c) {
    Json j;
    j["lengths"] = c.lengths;
    j["sequences_per_length"] = c.sequences_per_length;
    j["seed"] = c.seed;
    j["mode"] = rb_mode_name(c.mode);
    j["interleave_cz"] = c.interleave_cz;
    j["shots"] = c.shots;
    j["fit_spam"] = c.fit_spam;
    return j;
}

Json RBFit::to_json() const {
    Json j;
    j["dimension"] = dimension;
    j["lambda"] = lambda;
    j["lambda_error"] = lambda_error;
    j["lambda_leak"] = lambda_leak;
    j["lambda_leak_error"] = lambda_leak_error;
    j["lambda_leak_sum"] = lambda_leak_sum;
    j["lambda_leak_sum_error"] = lambda_leak_sum_error;
    j["fidelity"] = fidelity;
    j["fidelity_error"] = fidelity_error;
    j["fidelity_leak"] = fidelity_leak;
    j["fidelity_leak_error"] = fidelity_leak_error;
    j["spam"] = spam;
    j["spam_a"] = spam_a;
    j["spam_b"] = spam_b;
    j["spam_s"] = spam_s;
    j["chi2"] = chi2;
    j["converged"] = converged;
    return j;
}

RBFit fit_rb_decay(const std::vector<int> &lengths, const std::vector<double> &p_rec,
                   const std::vector<double> &p_other, int dimension, const std::vector<double> &sem_rec,
                   const std::vector<double> &sem_other, bool spam) {
    size_t n = lengths.size();
    if (n < 3 || p_rec.size() != n || p_other.size() != n) {
        throw ConfigError("RB fit needs >= 3 lengths with matching population curves", "lengths");
    }
    if (dimension < 2) {
        throw ConfigError("RB dimension must be >= 2", "dimension");
    }
    bool weighted = sem_rec.size() == n && sem_other.size() == n;
    std::vector<double> sum(n), sem_sum(n, 0.0);
    for (size_t k = 0; k < n; k++) {
        sum[k] = p_rec[k] + p_other[k];
        if (weighted) {
            sem_sum[k] = std::hypot(sem_rec[k], sem_other[k]);
        }
    }
    // Leakage is one-way, so the in-subspace total may only fall.
    for (size_t k = 1; k < n; k++) {
        double tol = 1e-3 + (weighted ? 4 * (sem_sum[k] + sem_sum[k - 1]) : 0);
        if (sum[k] > sum[k - 1] + tol) {
            throw NumericError("in-subspace population rises with length beyond the noise tolerance", "p_leak");
        }
    }
    // Weights: 1/sem with a floor so exact points do not dominate.
    auto weights = [&](const std::vector<double> &sem) {
        VectorXd w = VectorXd::Ones(static_cast<Eigen::Index>(n));
        if (!weighted) {
            return w;
        }
        std::vector<double> pos;
        for (double s : sem) {
            if (s > 0) {
                pos.push_back(s);
            }
        }
        if (pos.empty()) {
            return w;
        }
        std::nth_element(pos.begin(), pos.begin() + static_cast<long>(pos.size() / 2), pos.end());
        double floor = 0.5 * pos[pos.size() / 2];
        for (size_t k = 0; k < n; k++) {
            w[static_cast<Eigen::Index>(k)] = 1 / std::max(sem[k], floor);
        }
        return w;
    };
    VectorXd w_rec = weights(sem_rec), w_other = weights(sem_other), w_sum = weights(sem_sum);
    // Errors always follow the scatter about the fit.
    bool scale = true;
    double d = dimension;
    double a0 = 1 / d, b0 = 1 - 1 / d;

    auto model = [&](const VectorXd &p, size_t k, double *rec, double *other) {
        double m = lengths[k];
        double a = spam ? p[2] : a0, b = spam ? p[3] : b0, s = spam ? p[4] : 1.0;
        double lm = std::pow(p[0], m), ll = std::pow(p[1], m);
        *rec = (a + b * lm) * ll;
        *other = (s - a - b * lm) * ll;
    };
    ResidualFn f = [&](const VectorXd &p) {
        VectorXd r(2 * static_cast<Eigen::Index>(n));
        for (size_t k = 0; k < n; k++) {
            double rec, other;
            model(p, k, &rec, &other);
            auto i = static_cast<Eigen::Index>(k);
            r[i] = (rec - p_rec[k]) * w_rec[i];
            r[static_cast<Eigen::Index>(n) + i] = (other - p_other[k]) * w_other[i];
        }
        return r;
    };
    Eigen::Index np = spam ? 5 : 2;
    FitOptions opt;
    opt.lower = VectorXd::Constant(np, -std::numeric_limits<double>::infinity());
    opt.upper = VectorXd::Constant(np, std::numeric_limits<double>::infinity());
    opt.lower.head(2).setConstant(1e-6);
    opt.upper.head(2).setConstant(1.0);
    // Starts: log-spaced decay per Clifford.
    std::vector<VectorXd> starts;
    double m_max = lengths.back();
    for (double g : log_spaced(0.05 / m_max, 2.0 / m_max, 5)) {
        VectorXd s(np);
        s[0] = std::exp(-g);
        s[1] = std::max(1e-6, std::min(1.0, std::pow(std::max(sum.back(), 1e-3) / std::max(sum.front(), 1e-3),
                                                            1.0 / std::max(1.0, m_max - lengths.front()))));
        if (spam) {
            s[2] = a0;
            s[3] = b0;
            s[4] = 1;
        }
        starts.push_back(s);
    }
    FitResult r = multi_start(f, starts, opt, scale);
    RBFit out;
    out.dimension = dimension;
    out.spam = spam;
    out.lambda = r.params[0];
    out.lambda_leak = r.params[1];
    out.lambda_error = r.errors.size() ? r.errors[0] : 0;
    out.lambda_leak_error = r.errors.size() > 1 ? r.errors[1] : 0;
    out.spam_a = spam ? r.params[2] : a0;
    out.spam_b = spam ? r.params[3] : b0;
    out.spam_s = spam ? r.params[4] : 1.0;
    out.chi2 = r.chi2;
    out.converged = r.converged;
    out.fidelity = ((d - 1) * out.lambda + 1) / d;
    out.fidelity_error = (d - 1) / d * out.lambda_error;
    out.fidelity_leak = out.lambda_leak;
    out.fidelity_leak_error = out.lambda_leak_error;

    // Leakage from the in-subspace total alone: s lambda_leak^m.
    ResidualFn g = [&](const VectorXd &p) {
        VectorXd res(static_cast<Eigen::Index>(n));
        for (size_t k = 0; k < n; k++) {
            double s = spam ? p[1] : 1.0;
            auto i = static_cast<Eigen::Index>(k);
            res[i] = (s * std::pow(p[0], lengths[k]) - sum[k]) * w_sum[i];
        }
        return res;
    };
    Eigen::Index ng = spam ? 2 : 1;
    FitOptions opt_sum;
    opt_sum.lower = VectorXd::Constant(ng, -std::numeric_limits<double>::infinity());
    opt_sum.upper = VectorXd::Constant(ng, std::numeric_limits<double>::infinity());
    opt_sum.lower[0] = 1e-6;
    opt_sum.upper[0] = 1.0;
    VectorXd s0(ng);
    s0[0] = out.lambda_leak;
    if (spam) {
        s0[1] = out.spam_s;
    }
    FitResult rs = levenberg_marquardt(g, s0, opt_sum, scale);
    out.lambda_leak_sum = rs.params[0];
    out.lambda_leak_sum_error = rs.errors.size() ? rs.errors[0] : 0;
    return out;
}

RBFit fit_single_with_leakage(const std::vector<int> &lengths, const std::vector<double> &p0,
                              const std::vector<double> &p1, const std::vector<double> &sem0,
                              const std::vector<double> &sem1, bool spam) {
    return fit_rb_decay(lengths, p0, p1, 2, sem0, sem1, spam);
}

Json RBOutcome::to_json() const {
    Json j;
    j["config"] = rb_config_to_json(config);
    j["dimension"] = dimension;
    Json rows = Json::array();
    for (size_t k = 0; k < lengths.size(); k++) {
        Json r;
        r["length"] = lengths[k];
        r["p_rec"] = p_rec[k];
        r["p_other"] = p_other[k];
        r["p_leak"] = p_leak[k];
        r["sem_rec"] = sem_rec[k];
        r["sem_other"] = sem_other[k];
        rows.push_back(r);
    }
    j["per_length"] = rows;
    j["fit"] = fit.to_json();
    return j;
}

std::vector<int> random_clifford_sequence(int length, uint64_t seed, uint64_t stream) {
    Rng rng = Rng::derive(seed, stream);
    std::vector<int> s(static_cast<size_t>(std::max(length, 0)));
    for (int &c : s) {
        c = 1 + static_cast<int>(rng.below(kNumCliffords));
    }
    return s;
}

namespace {

// Shared aggregation: records in (length, index) order, then per-length statistics.
RBOutcome aggregate(const RBConfig &config, int dimension, std::vector<RBRecord> records) {
    RBOutcome out;
    out.config = config;
    out.dimension = dimension;
    out.lengths = config.lengths;
    size_t per = static_cast<size_t>(config.sequences_per_length);
    for (size_t k = 0; k < config.lengths.size(); k++) {
        std::vector<double> rec, other, leak;
        for (size_t i = 0; i < per; i++) {
            const auto &r = records[k * per + i];
            rec.push_back(r.p_rec);
            other.push_back(r.p_other);
            leak.push_back(r.leak);
        }
        double m, s;
        mean_and_sem(rec, &m, &s);
        out.p_rec.push_back(m);
        out.sem_rec.push_back(s);
        mean_and_sem(other, &m, &s);
        out.p_other.push_back(m);
        out.sem_other.push_back(s);
        mean_and_sem(leak, &m, &s);
        out.p_leak.push_back(m);
    }
    out.records = std::move(records);
    out.fit = fit_rb_decay(out.lengths, out.p_rec, out.p_other, dimension, out.sem_rec, out.sem_other,
                           config.fit_spam);
    return out;
}

RBRecord finish_record(const RBConfig &config, int length, int index, uint64_t stream, double rec, double other,
                       double leak) {
    check_populations(rec, other, leak);
    RBRecord r;
    r.length = length;
    r.index = index;
    if (config.shots > 0) {
        Rng rng = Rng::derive(config.seed, kStreamShots + stream);
        auto s = sample_shots(rec, other, config.shots, rng);
        rec = s[0];
        other = s[1];
        leak = s[2];
    }
    r.p_rec = rec;
    r.p_other = other;
    r.leak = leak;
    return r;
}

}  // namespace

RBOutcome run_rb(const RBConfig &config, const SingleExecutor &exec) {
    config.validate();
    if (config.mode != RBMode::Single) {
        throw ConfigError("run_rb handles the single mode", "mode");
    }
    size_t per = static_cast<size_t>(config.sequences_per_length);
    size_t total = config.lengths.size() * per;
    auto records = parallel_map(total, config.workers, [&](size_t t) {
        size_t k = t / per;
        int i = static_cast<int>(t % per);
        int m = config.lengths[k];
        uint64_t stream = sequence_stream(k, i);
        auto seq = random_clifford_sequence(m - 1, config.seed, stream);
        seq.push_back(recovery_of(seq));
        Populations p = exec(seq, splitmix64(config.seed ^ (kStreamExecutor + stream)));
        return finish_record(config, m, i, stream, p.p0, p.p1, p.leak);
    });
    return aggregate(config, 2, std::move(records));
}

RBOutcome run_two_qubit_rb(const RBConfig &config, const TwoQubitExecutor &exec) {
    config.validate();
    if (config.mode != RBMode::Interleaved) {
        throw ConfigError("run_two_qubit_rb handles the interleaved mode (reference or CZ)", "mode");
    }
    size_t per = static_cast<size_t>(config.sequences_per_length);
    size_t total = config.lengths.size() * per;
    auto records = parallel_map(total, config.workers, [&](size_t t) {
        size_t k = t / per;
        int i = static_cast<int>(t % per);
        int m = config.lengths[k];
        uint64_t stream = sequence_stream(k, i);
        auto a = random_clifford_sequence(m - 1, config.seed, stream);
        auto b = random_clifford_sequence(m - 1, config.seed, kStreamSequenceB + stream);
        TwoQubitSequence seq;
        seq.interleave_cz = config.interleave_cz;
        Mat4 net = Mat4::Identity();
        for (size_t j = 0; j < a.size(); j++) {
            seq.layers.push_back({a[j], b[j]});
            if (seq.interleave_cz) {
                net = cz_unitary() * net;
            }
            net = kron(clifford_unitary(a[j]), clifford_unitary(b[j])) * net;
        }
        if (seq.interleave_cz) {
            net = cz_unitary() * net;
        } else {
            seq.recovery_local = {recovery_of(a), recovery_of(b)};
        }
        seq.recovery = net.adjoint();
        TwoQubitPopulations p = exec(seq, splitmix64(config.seed ^ (kStreamExecutor + stream)));
        return finish_record(config, m, i, stream, p.p[0], p.p[1] + p.p[2] + p.p[3], p.leak);
    });
    return aggregate(config, 4, std::move(records));
}

Json InterleavedFit::to_json() const {
    Json j;
    j["ratio"] = ratio;
    j["ratio_error"] = ratio_error;
    j["fidelity_cz"] = fidelity;
    j["fidelity_cz_error"] = fidelity_error;
    j["fidelity_cz_leak"] = leak_ratio;
    j["fidelity_cz_leak_error"] = leak_ratio_error;
    j["unphysical"] = unphysical;
    return j;
}

InterleavedFit fit_interleaved_cz(const RBOutcome &reference, const RBOutcome &interleaved) {
    if (reference.lengths != interleaved.lengths) {
        throw ConfigError("reference and interleaved RB must share the length list", "lengths");
    }
    if (!reference.fit.converged || !interleaved.fit.converged) {
        throw ConvergenceError("reference or interleaved RB fit did not converge", "fit");
    }
    const RBFit &l = reference.fit, &r = interleaved.fit;
    InterleavedFit out;
    auto ratio = [](double num, double num_err, double den, double den_err, double *err) {
        double q = num / den;
        *err = std::abs(q) * std::hypot(num_err / num, den_err / den);
        return q;
    };
    out.ratio = ratio(r.lambda, r.lambda_error, l.lambda, l.lambda_error, &out.ratio_error);
    double d = 4;
    out.fidelity = ((d - 1) * out.ratio + 1) / d;
    out.fidelity_error = (d - 1) / d * out.ratio_error;
    out.leak_ratio = ratio(r.lambda_leak, r.lambda_leak_error, l.lambda_leak, l.lambda_leak_error,
                           &out.leak_ratio_error);
    out.unphysical = r.lambda - l.lambda > 2 * std::hypot(r.lambda_error, l.lambda_error);
    return out;
}

std::array<RBOutcome, 2> run_simultaneous_rb(const RBConfig &config_a, const RBConfig &config_b,
                                             const SimultaneousExecutor &exec) {
    config_a.validate();
    config_b.validate();
    if (config_a.lengths != config_b.lengths || config_a.sequences_per_length != config_b.sequences_per_length) {
        throw ConfigError("simultaneous RB needs one length list and sequence count for both CQBs", "lengths");
    }
    const RBConfig &c = config_a;
    size_t per = static_cast<size_t>(c.sequences_per_length);
    size_t total = c.lengths.size() * per;
    auto pairs = parallel_map(total, c.workers, [&](size_t t) {
        size_t k = t / per;
        int i = static_cast<int>(t % per);
        int m = c.lengths[k];
        uint64_t stream = sequence_stream(k, i);
        auto a = random_clifford_sequence(m - 1, config_a.seed, stream);
        auto b = random_clifford_sequence(m - 1, config_b.seed, kStreamSequenceB + stream);
        a.push_back(recovery_of(a));
        b.push_back(recovery_of(b));
        auto p = exec(a, b, splitmix64(config_a.seed ^ config_b.seed ^ (kStreamExecutor + stream)));
        return std::array<RBRecord, 2>{
            finish_record(config_a, m, i, stream, p[0].p0, p[0].p1, p[0].leak),
            finish_record(config_b, m, i, kStreamSequenceB + stream, p[1].p0, p[1].p1, p[1].leak)};
    });
    std::vector<RBRecord> ra, rb;
    for (const auto &p : pairs) {
        ra.push_back(p[0]);
        rb.push_back(p[1]);
    }
    RBConfig ca = config_a, cb = config_b;
    ca.mode = cb.mode = RBMode::Simultaneous;
    return {aggregate(ca, 2, std::move(ra)), aggregate(cb, 2, std::move(rb))};
}

SingleExecutor depolarizing_executor(const DepolarizingChannel &ch) {
    if (!(ch.p >= 0 && ch.p <= 1) || !(ch.lambda_leak > 0 && ch.lambda_leak <= 1)) {
        throw ConfigError("depolarizing channel needs p in [0, 1] and lambda_leak in (0, 1]", "p");
    }
    return [ch](const std::vector<int> &seq, uint64_t) {
        Mat2 rho = Mat2::Zero();
        rho(0, 0) = 1;
        double leak = 0;
        for (int c : seq) {
            Mat2 u = clifford_unitary(c);
            rho = u * rho * u.adjoint();
            cdouble tr = rho.trace();
            rho = (1 - ch.p) * rho + ch.p * tr / 2.0 * Mat2::Identity();
            leak += (1 - ch.lambda_leak) * tr.real();
            rho *= ch.lambda_leak;
        }
        return Populations{rho(0, 0).real(), rho(1, 1).real(), leak};
    };
}

TwoQubitExecutor two_qubit_channel_executor(const TwoQubitChannel &ch) {
    auto ok = [](double p, double l) { return p >= 0 && p <= 1 && l > 0 && l <= 1; };
    if (!ok(ch.p_layer, ch.lambda_leak_layer) || !ok(ch.p_cz, ch.lambda_leak_cz)) {
        throw ConfigError("two-CQB channel needs p in [0, 1] and lambda_leak in (0, 1]", "p_layer");
    }
    return [ch](const TwoQubitSequence &seq, uint64_t) {
        Mat4 rho = Mat4::Zero();
        rho(0, 0) = 1;
        double leak = 0;
        auto noisy = [&](const Mat4 &u, double p, double lambda_leak) {
            rho = u * rho * u.adjoint();
            cdouble tr = rho.trace();
            rho = (1 - p) * rho + p * tr / 4.0 * Mat4::Identity();
            leak += (1 - lambda_leak) * tr.real();
            rho *= lambda_leak;
        };
        auto gate = [&]() {
            if (seq.interleave_cz) {
                noisy(cz_unitary(), ch.p_cz, ch.lambda_leak_cz);
            }
        };
        for (const auto &l : seq.layers) {
            gate();
            noisy(kron(clifford_unitary(l[0]), clifford_unitary(l[1])), ch.p_layer, ch.lambda_leak_layer);
        }
        gate();
        noisy(seq.recovery, ch.p_layer, ch.lambda_leak_layer);
        TwoQubitPopulations out;
        for (int k = 0; k < 4; k++) {
            out.p[static_cast<size_t>(k)] = rho(k, k).real();
        }
        out.leak = leak;
        return out;
    };
}

namespace {

using Mat9 = Eigen::Matrix<cdouble, 9, 9>;
using Vec9 = Eigen::Matrix<cdouble, 9, 1>;

Vec9 flatten(const Mat3 &m) {
    Vec9 v;
    for (int i = 0; i < 3; i++) {
        for (int j = 0; j < 3; j++) {
            v[3 * i + j] = m(i, j);
        }
    }
    return v;
}

Mat3 embed3(const Mat2 &u) {
    Mat3 m = Mat3::Identity();
    m.block<2, 2>(0, 0) = u;
    return m;
}

}  // namespace

SingleExecutor compiled_lindblad_executor(const CQBSpec &spec, const CalibratedGateSet &calib,
                                          const LeakageRates &rates) {
    calib.validate();
    rates.validate();
    auto table = std::make_shared<std::vector<Mat9>>(kNumCliffords + 1, Mat9::Identity());
    for (int c = 1; c <= kNumCliffords; c++) {
        auto cs = compile_sequence({SequenceItem::of_clifford(c)}, calib);
        Mat3 in = embed3(rot_z(calib.axis_phase));
        Mat3 out = embed3(rot_z(-cs.ledger.phase[0]) * rot_z(-calib.axis_phase));
        auto apply = [&](const Mat3 &rho) {
            CQBState s;
            s.rho = in * rho * in.adjoint();
            s = evolve_lindblad(spec, rates, s, cs.waveform);
            return Mat3(out * s.rho * out.adjoint());
        };
        Mat9 &sup = (*table)[static_cast<size_t>(c)];
        for (int i = 0; i < 3; i++) {
            for (int j = 0; j < 3; j++) {
                Mat3 e = Mat3::Zero();
                Mat3 image;
                if (i == j) {
                    e(i, i) = 1;
                    image = apply(e);
                } else {
                    // E_ij = (Sym - i Asym) / 2 with both Hermitian.
                    Mat3 sym = Mat3::Zero(), asym = Mat3::Zero();
                    sym(i, j) = sym(j, i) = 1;
                    asym(i, j) = cdouble(0, 1);
                    asym(j, i) = cdouble(0, -1);
                    image = (apply(sym) - cdouble(0, 1) * apply(asym)) / 2.0;
                }
                sup.col(3 * i + j) = flatten(image);
            }
        }
    }
    return [table](const std::vector<int> &seq, uint64_t) {
        Vec9 v = Vec9::Zero();
        v[0] = 1;
        for (int c : seq) {
            v = (*table)[static_cast<size_t>(c)] * v;
        }
        return Populations{v[0].real(), v[4].real(), v[8].real()};
    };
}

SingleExecutor compiled_unitary_executor(const CQBSpec &spec, const CalibratedGateSet &calib, double sigma_delta) {
    calib.validate();
    if (!(sigma_delta >= 0)) {
        throw ConfigError("sigma_delta must be >= 0", "sigma_delta");
    }
    return [spec, calib, sigma_delta](const std::vector<int> &seq, uint64_t seed) {
        std::vector<SequenceItem> items;
        for (int c : seq) {
            items.push_back(SequenceItem::of_clifford(c));
        }
        auto cs = compile_sequence(items, calib);
        CQBSpec s = spec;
        Rng rng(seed);
        s.delta += sigma_delta * rng.normal();
        Mat2 u = rot_z(-cs.ledger.phase[0]) * to_logical_frame(unitary_of_waveform(s, cs.waveform), calib);
        double p0 = std::norm(u(0, 0));
        return Populations{p0, 1 - p0, 0};
    };
}

SimultaneousExecutor simultaneous_unitary_executor(const TwoCQBSpec &spec, const TwoCQBGateSets &sets,
                                                   double sigma_delta, double parked_zz) {
    sets.a.validate();
    sets.b.validate();
    if (!(sigma_delta >= 0) || !std::isfinite(parked_zz)) {
        throw ConfigError("sigma_delta must be >= 0 and parked_zz finite", "sigma_delta");
    }
    return [spec, sets, sigma_delta, parked_zz](const std::vector<int> &a, const std::vector<int> &b, uint64_t seed) {
        std::vector<SequenceItem> items;
        for (size_t k = 0; k < std::max(a.size(), b.size()); k++) {
            if (k < a.size()) {
                items.push_back(SequenceItem::of_clifford(a[k], 0));
            }
            if (k < b.size()) {
                items.push_back(SequenceItem::of_clifford(b[k], 1));
            }
        }
        auto prog = compile_two_cqb(items, spec, sets);
        TwoCQBSpec s = spec;
        Rng rng(seed);
        s.cqb_a.delta += sigma_delta * rng.normal();
        s.cqb_b.delta += sigma_delta * rng.normal();
        if (parked_zz != 0) {
            size_t n = prog.eps_a.size();
            prog.cz.sample_period = prog.sample_period;
            prog.cz.detuning.assign(n, 0);
            prog.cz.shift_a.assign(n, 0);
            prog.cz.shift_b.assign(n, 0);
            prog.cz.zeta.assign(n, parked_zz);
        }
        Mat4 u = kron(rot_z(-prog.ledger.phase[0]), rot_z(-prog.ledger.phase[1])) *
                 two_cqb_logical_frame(simulate_two_cqb(s, prog), sets);
        double p00 = std::norm(u(0, 0)), p01 = std::norm(u(1, 0)), p10 = std::norm(u(2, 0));
        double pa0 = p00 + p01, pb0 = p00 + p10;
        return std::array<Populations, 2>{Populations{pa0, 1 - pa0, 0}, Populations{pb0, 1 - pb0, 0}};
    };
}

Json simultaneous_timing(const std::vector<int> &seq_a, const std::vector<int> &seq_b, const TwoCQBSpec &spec,
                         const TwoCQBGateSets &sets) {
    (void)spec;
    Json j;
    const std::vector<int> *seqs[2] = {&seq_a, &seq_b};
    const CalibratedGateSet *cal[2] = {&sets.a, &sets.b};
    const char *names[2] = {"cqb_a", "cqb_b"};
    for (int q = 0; q < 2; q++) {
        GateTrack track(*cal[q]);
        Json starts = Json::array();
        for (int c : *seqs[q]) {
            starts.push_back(track.cursor());
            for (auto p : clifford_to_primitives(c)) {
                track.add(p);
            }
        }
        j[names[q]] = {{"clifford_starts_s", starts}, {"end_s", track.cursor()}};
    }
    return j;
}

void write_rb_records_csv(const std::string &path, const RBOutcome &out) {
    std::vector<std::vector<double>> rows;
    for (const auto &r : out.records) {
        rows.push_back({static_cast<double>(r.length), static_cast<double>(r.index), r.p_rec, r.p_other, r.leak});
    }
    write_csv(path, {"length", "index", "p_rec", "p_other", "p_leak"}, rows);
}

}  // namespace cqbsim

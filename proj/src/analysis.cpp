#include "scw/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "scw/rational.hpp"
#include "scw/rng.hpp"

namespace scw {

namespace {
std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
}  // namespace

bool ParamRanges::valid(std::string* why) const {
  const auto bad = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  const auto ordered = [](const Interval& i) { return i.lo <= i.hi; };
  if (!ordered(a_s_min) || !ordered(a_n_min) || !ordered(a_n_max) || !ordered(T) ||
      !ordered(v) || !ordered(a_n))
    return bad("interval with lo > hi");
  if (a_n_min.lo <= 0.0) return bad("a_n_min must be positive");
  if (a_n_max.lo <= 0.0) return bad("a_n_max must be positive");
  if (T.lo <= 0.0) return bad("T must be positive");
  if (v.lo < 0.0) return bad("v must be nonnegative");
  if (!(a_n_min.hi < a_s_min.lo))
    return bad("hypothesis a_n_min < a_s_min violated by the ranges");
  return true;
}

std::string StudyReport::to_key_value_text() const {
  std::ostringstream os;
  os << "study = " << name << "\n";
  os << "samples = " << samples << "\n";
  os << "failures = " << failures << "\n";
  os << "worst_margin = " << fmt(worst_margin) << "\n";
  os << "seed = " << seed << "\n";
  if (!config_echo.empty()) os << "config = " << config_echo << "\n";
  for (const auto& [k, v] : extra) os << k << " = " << fmt(v) << "\n";
  if (!first_counterexample.empty())
    os << "first_counterexample = " << first_counterexample << "\n";
  return os.str();
}

RationalMargins exact_margins(const SampleTuple& t, ThresholdVariant variant) {
  const Rational v = rational_from_double(t.v);
  const Rational an = rational_from_double(t.a_n);
  const Rational anmax = rational_from_double(t.a_n_max);
  const Rational anmin = rational_from_double(t.a_n_min);
  const Rational asmin = rational_from_double(t.a_s_min);
  const Rational T = rational_from_double(t.T);

  const Rational v1 = v + anmax * T;
  const Rational m1 = v * T + anmax * T * T / 2 + v1 * v1 / (2 * asmin);

  const Rational v3 = v + an * T;
  const Rational m3 =
      v3 >= 0 ? Rational(v * T + an * T * T / 2 + v3 * v3 / (2 * asmin))
              : Rational(-(v * v) / (2 * an));

  RationalMargins out{m1 - m3, std::nullopt};
  if (v3 >= 0) {
    const Rational m5 = v * T + an * T * T / 2 + v3 * v3 / (2 * anmin);
    out.m5_minus_m3 = m5 - m3;
  } else if (variant == ThresholdVariant::SignCorrected) {
    out.m5_minus_m3 = Rational(0);  // both branches equal -v^2/(2 a_n)
  }
  return out;
}

namespace {

SampleTuple sample_tuple(const ParamRanges& r, Rng& rng) {
  SampleTuple t;
  t.a_s_min = rng.uniform(r.a_s_min.lo, r.a_s_min.hi);
  t.a_n_min = rng.uniform(r.a_n_min.lo, r.a_n_min.hi);
  t.a_n_max = rng.uniform(r.a_n_max.lo, r.a_n_max.hi);
  t.T = rng.uniform(r.T.lo, r.T.hi);
  t.v = rng.uniform(r.v.lo, r.v.hi);
  t.a_n = std::clamp(rng.uniform(r.a_n.lo, r.a_n.hi), -t.a_n_min, t.a_n_max);
  return t;
}

std::string tuple_text(const SampleTuple& t) {
  std::ostringstream os;
  os << "a_s_min=" << fmt(t.a_s_min) << " a_n_min=" << fmt(t.a_n_min)
     << " a_n_max=" << fmt(t.a_n_max) << " T=" << fmt(t.T) << " v=" << fmt(t.v)
     << " a_n=" << fmt(t.a_n);
  return os.str();
}

}  // namespace

StudyReport compare_metrics(const ParamRanges& ranges, std::uint64_t n,
                            std::uint64_t seed,
                            std::vector<std::string>* margins_csv) {
  std::string why;
  if (!ranges.valid(&why)) throw std::invalid_argument("compare_metrics: " + why);

  StudyReport rep;
  rep.name = "compare-metrics";
  rep.seed = seed;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  std::uint64_t rational_rechecks = 0;

  if (margins_csv)
    margins_csv->push_back("variant,a_s_min,a_n_min,a_n_max,T,v,a_n,m1_minus_m3,m5_minus_m3");

  const auto check_tuple = [&](const SampleTuple& t) {
    const SystemParams p{t.a_n_max, t.a_n_min, t.a_s_min, t.T};
    const double m1 = msd_conservative(t.v, t.T, p);
    const double m3 = msd_permissive(t.v, t.a_n, t.T, p);
    for (ThresholdVariant variant :
         {ThresholdVariant::AsWritten, ThresholdVariant::SignCorrected}) {
      const double m5 = msd_areq(t.v, t.a_n, p, variant);
      const double margins[2] = {m1 - m3, m5 - m3};
      ++rep.samples;
      for (int which = 0; which < 2; ++which) {
        const double m = margins[which];
        if (std::isinf(m)) continue;  // infinite metric dominates trivially
        rep.worst_margin = std::min(rep.worst_margin, m);
        bool ok;
        if (m >= -1e-9 && std::fabs(m) > 1e-6) {
          ok = true;
        } else {
          // Near a tie (or apparently negative): decide exactly.
          ++rational_rechecks;
          const RationalMargins exact = exact_margins(t, variant);
          const Rational& rm =
              which == 0 ? exact.m1_minus_m3 : *exact.m5_minus_m3;
          ok = rm >= 0;
        }
        if (!ok) {
          ++rep.failures;
          if (rep.first_counterexample.empty())
            rep.first_counterexample =
                std::string(which == 0 ? "msd1<msd3 " : "msd5<msd3 ") +
                tuple_text(t) + " margin=" + fmt(m);
        }
      }
      if (margins_csv) {
        std::ostringstream os;
        os << (variant == ThresholdVariant::AsWritten ? "as-written" : "sign-corrected")
           << "," << fmt(t.a_s_min) << "," << fmt(t.a_n_min) << "," << fmt(t.a_n_max)
           << "," << fmt(t.T) << "," << fmt(t.v) << "," << fmt(t.a_n) << ","
           << fmt(margins[0]) << "," << fmt(margins[1]);
        margins_csv->push_back(os.str());
      }
    }
  };

  // Full corner grid first (the extreme tuples), then the random sweep.
  const Interval* dims[6] = {&ranges.a_s_min, &ranges.a_n_min, &ranges.a_n_max,
                             &ranges.T,       &ranges.v,       &ranges.a_n};
  for (int mask = 0; mask < 64; ++mask) {
    double vals[6];
    for (int d = 0; d < 6; ++d) vals[d] = (mask >> d) & 1 ? dims[d]->hi : dims[d]->lo;
    SampleTuple t{vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]};
    t.a_n = std::clamp(t.a_n, -t.a_n_min, t.a_n_max);
    check_tuple(t);
  }
  Rng rng(seed);
  for (std::uint64_t i = 0; i < n; ++i) check_tuple(sample_tuple(ranges, rng));

  rep.extra.emplace_back("rational_rechecks", static_cast<double>(rational_rechecks));
  std::ostringstream echo;
  echo << "n=" << n << " corners=64x2variants";
  rep.config_echo = echo.str();
  return rep;
}

EpisodeConfig wrong_msd_witness_episode(std::uint64_t index, std::uint64_t seed,
                                        DurationPolicy duration_policy,
                                        MonitorMode monitor) {
  EpisodeConfig cfg;
  cfg.model = ModelId::M3Wrong;
  cfg.duration_policy = duration_policy;
  cfg.monitor = monitor;
  cfg.depth = 3;
  cfg.dense_samples = 20;
  cfg.seed = mix_seed(seed, index);
  cfg.constraint_policy.kind = ConstraintPolicy::Kind::Fixed;
  cfg.nominal_policy.kind = NominalPolicy::Kind::Schedule;

  if (index == 0) {
    // Canonical witness: the request brakes to a stop within the period and
    // the gap sits exactly on the admissibility bound.
    cfg.params = {2.0, 3.0, 5.0, 1.0};
    cfg.initial = {0.0, 1.0};
    cfg.constraint_policy.fixed = {0.1, 0.0};
    cfg.nominal_policy.schedule = {-3.0};
    return cfg;
  }

  Rng rng(mix_seed(seed, index) ^ 0x5eedull);
  SystemParams p;
  p.a_s_min = rng.uniform(2.0, 10.0);
  p.a_n_min = rng.uniform(1.0, 0.9 * p.a_s_min);
  p.a_n_max = rng.uniform(0.5, 3.0);
  p.T = rng.uniform(0.2, 2.0);
  cfg.params = p;

  const double v = rng.uniform(0.05, 0.95) * p.a_n_min * p.T;
  // Braking request that reaches standstill strictly within the period.
  const double a_lo = -p.a_n_min, a_hi = -v / p.T;
  const double a_n = a_hi + rng.uniform(0.05, 1.0) * (a_lo - a_hi);
  cfg.initial = {0.0, v};
  cfg.nominal_policy.schedule = {a_n};

  const double bound = v * v / (2.0 * p.a_s_min);
  const double stop_dist = v * v / (2.0 * -a_n);
  const double wrong = msd_wrong(v, a_n, p.T, p);
  const double lo = std::max(bound, wrong);
  double gap = bound;
  if (lo < stop_dist) gap = lo + rng.uniform(0.0, 0.9) * (stop_dist - lo);
  cfg.constraint_policy.fixed = {gap <= bound ? bound : gap, 0.0};
  if (!admissible(ModelId::M3Wrong, cfg.initial, cfg.constraint_policy.fixed, p))
    cfg.constraint_policy.fixed.x_c =
        std::nextafter(cfg.constraint_policy.fixed.x_c,
                       std::numeric_limits<double>::infinity());
  return cfg;
}

StudyReport falsify_wrong_msd(std::uint64_t n, std::uint64_t seed) {
  StudyReport rep;
  rep.name = "falsify-wrong-msd";
  rep.seed = seed;
  std::uint64_t violations = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const EpisodeConfig cfg =
        wrong_msd_witness_episode(i, seed, DurationPolicy::AlwaysT, MonitorMode::Dense);
    const EpisodeResult r = run_episode(cfg);
    ++rep.samples;
    if (r.verdict.outcome == Outcome::Violation) {
      ++violations;
      if (rep.first_counterexample.empty()) {
        std::ostringstream os;
        os << "episode " << i << " t=" << fmt(r.verdict.violation_time)
           << " x=" << fmt(r.verdict.violation_state.x)
           << " v=" << fmt(r.verdict.violation_state.v)
           << " gap=" << fmt(cfg.constraint_policy.fixed.x_c - cfg.initial.x);
        rep.first_counterexample = os.str();
      }
    }
  }
  // The study succeeds by finding counterexamples of the faulty metric;
  // an empty search is the failure mode.
  rep.failures = violations == 0 ? 1 : 0;
  if (rep.failures && rep.first_counterexample.empty())
    rep.first_counterexample = "no violation found for the faulty metric";
  rep.extra.emplace_back("violations", static_cast<double>(violations));
  return rep;
}

StudyReport endstep_study(std::uint64_t n, std::uint64_t seed) {
  StudyReport rep;
  rep.name = "endstep-study";
  rep.seed = seed;
  std::uint64_t dense = 0, endstep = 0, m3_dense = 0, m3_endstep = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    EpisodeConfig cfg =
        wrong_msd_witness_episode(i, seed, DurationPolicy::AlwaysT, MonitorMode::Dense);
    rep.samples += 1;
    if (run_episode(cfg).verdict.outcome == Outcome::Violation) ++dense;
    cfg.monitor = MonitorMode::EndOfStepOnly;
    if (run_episode(cfg).verdict.outcome == Outcome::Violation) ++endstep;
    cfg.model = ModelId::M3;
    if (run_episode(cfg).verdict.outcome == Outcome::Violation) ++m3_endstep;
    cfg.monitor = MonitorMode::Dense;
    if (run_episode(cfg).verdict.outcome == Outcome::Violation) ++m3_dense;
  }
  rep.extra.emplace_back("dense_violations", static_cast<double>(dense));
  rep.extra.emplace_back("endstep_violations", static_cast<double>(endstep));
  rep.extra.emplace_back("m3_dense_violations", static_cast<double>(m3_dense));
  rep.extra.emplace_back("m3_endstep_violations", static_cast<double>(m3_endstep));
  // Expected separation: dense monitoring exposes the fault, end-of-step
  // monitoring of full-period evolutions hides it, the fixed metric is clean.
  rep.failures = endstep + m3_dense + m3_endstep + (dense == 0 ? 1 : 0);
  if (rep.failures && rep.first_counterexample.empty())
    rep.first_counterexample = "monitoring separation not reproduced";
  return rep;
}

StudyReport obligation_study(ModelId id, const ParamRanges& ranges,
                             std::uint64_t n, std::uint64_t seed,
                             ThresholdVariant m5_variant) {
  std::string why;
  if (!ranges.valid(&why)) throw std::invalid_argument("obligation_study: " + why);
  StudyReport rep;
  rep.name = "obligations-" + to_string(id);
  rep.seed = seed;
  Rng rng(seed);
  std::uint64_t done = 0, param_tuples = 0;
  while (done < n) {
    SystemParams p;
    p.a_s_min = rng.uniform(ranges.a_s_min.lo, ranges.a_s_min.hi);
    p.a_n_min = rng.uniform(ranges.a_n_min.lo, ranges.a_n_min.hi);
    p.a_n_max = rng.uniform(ranges.a_n_max.lo, ranges.a_n_max.hi);
    p.T = rng.uniform(ranges.T.lo, ranges.T.hi);
    const int chunk = static_cast<int>(std::min<std::uint64_t>(100, n - done));
    const ObligationReport r = check_invariant_obligations(
        id, p, chunk, mix_seed(seed, ++param_tuples), m5_variant);
    done += static_cast<std::uint64_t>(r.samples);
    rep.failures += static_cast<std::uint64_t>(r.fail_init + r.fail_step + r.fail_guarantee);
    if (r.first_failure && rep.first_counterexample.empty()) {
      std::ostringstream os;
      const auto& f = *r.first_failure;
      os << "obligation " << f.obligation << " sample " << f.sample << " ("
         << f.detail << ") params a_s_min=" << fmt(p.a_s_min)
         << " a_n_min=" << fmt(p.a_n_min) << " a_n_max=" << fmt(p.a_n_max)
         << " T=" << fmt(p.T) << " x=" << fmt(f.state.x) << " v=" << fmt(f.state.v)
         << " x_c=" << fmt(f.constraint.x_c) << " v_c=" << fmt(f.constraint.v_c)
         << " a_n=" << fmt(f.a_n);
      rep.first_counterexample = os.str();
    }
  }
  rep.samples = done;
  rep.extra.emplace_back("param_tuples", static_cast<double>(param_tuples));
  return rep;
}

}  // namespace scw

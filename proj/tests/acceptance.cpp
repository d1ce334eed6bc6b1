// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "conedensity/cone_calculus.hpp"
#include "conedensity/io.hpp"
#include "corpus.hpp"

using namespace testing_support;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Counts failures and keeps the first few messages.
struct Tally {
  int cases = 0, failed = 0;
  std::string first;
  void check(bool ok, const std::string& what) {
    ++cases;
    if (ok) return;
    ++failed;
    if (first.empty()) first = what;
  }
  Outcome outcome(const std::string& extra = "") const {
    std::ostringstream s;
    s << cases - failed << "/" << cases << " checks passed";
    if (!extra.empty()) s << ", " << extra;
    if (failed) s << "; first failure: " << first;
    return {failed == 0, s.str()};
  }
};

// Nearby complex with a certificate of small cost: a translate with its exact
// witness, or shifted levels with theirs.
std::pair<TwistedComplex, InterleavingCertificate> perturb(std::mt19937& rng, const TwistedComplex& C) {
  if (rng() % 2) {
    auto D = translate(C, frac(static_cast<long>(rng() % 3), 4));
    return {D, *distance_exact(C, D).witness};
  }
  auto levels = point_levels(C);
  for (auto& l : levels) l += frac(static_cast<long>(rng() % 3) - 1, 4);
  std::vector<int> degs;
  for (const auto& g : C.gens()) degs.push_back(g.deg);
  try {
    auto D = point_complex(levels, degs, C.diff());
    auto d = distance_exact(C, D);
    if (d.witness) return {D, *d.witness};
  } catch (const Error&) {
    // moved levels broke the hom rule
  }
  return {C, identity_certificate(C)};
}

Rational eps_for(const std::vector<InterleavingCertificate>& certs) {
  Rational eps = frac(1, 4);
  for (const auto& c : certs) eps = std::max<Rational>(eps, c.cost());
  return eps;
}

std::string str(const ExtValue& v) { return to_string(v); }

// Replay plus an independent exact measurement.
void check_record_measured(Tally& t, const ConeTransportRecord& r, const Rational& bound, const std::string& tag) {
  const bool replays = replay(r.input, r.output, r.certificate).ok;
  const Rational cost = r.certificate.cost();
  t.check(replays, tag + ": certificate does not replay");
  t.check(cost <= bound, tag + ": cost " + to_string(cost) + " above " + to_string(bound));
  auto m = distance_exact(r.input, r.output);
  t.check(!m.hit_cap, tag + ": measurement hit the cap");
  t.check(m.upper <= ExtValue(cost), tag + ": measured " + str(m.upper) + " above certified " + to_string(cost));
}

// -- criteria ---------------------------------------------------------------

Outcome isometry() {
  std::mt19937 rng(1001);
  Tally t;
  for (int k = 0; k < 100; ++k) {
    auto F = random_point_complex(rng, 12, 8), G = random_point_complex(rng, 12, 8);
    auto d = distance_exact(F, G);
    auto want = interleaving_bottleneck(gabriel_decompose(F).barcode, gabriel_decompose(G).barcode);
    t.check(d.mode == DistanceResult::Mode::Exact, "instance " + std::to_string(k) + " undecided");
    t.check(d.upper == want, "instance " + std::to_string(k) + ": " + str(d.upper) + " vs " + str(want));
  }
  return t.outcome();
}

Outcome cone_replacement() {
  std::mt19937 rng(1002);
  Tally t;
  for (int k = 0; k < 200; ++k) {
    auto A = random_point_complex(rng, 5, 5), B = random_point_complex(rng, 5, 5);
    auto f = random_chain_map(rng, A, B);
    auto [A2, ca] = perturb(rng, A);
    auto [B2, cb] = perturb(rng, B);
    const Rational eps = eps_for({ca, cb});
    const auto tag = "instance " + std::to_string(k);
    check_record_measured(t, replace_source(A, B, f, A2, ca, eps), 4 * eps, tag + " source");
    check_record_measured(t, replace_target(A, B, f, B2, cb, eps), 4 * eps, tag + " target");
  }
  return t.outcome("two records per instance");
}

Outcome cone_and_tower_transport() {
  std::mt19937 rng(1003);
  Tally t;
  for (int k = 0; k < 100; ++k) {
    auto G0 = random_point_complex(rng, 4, 4), G1 = random_point_complex(rng, 4, 4);
    auto f = random_chain_map(rng, G0, G1);
    auto [G0b, c0] = perturb(rng, G0);
    auto [G1b, c1] = perturb(rng, G1);
    const Rational eps = eps_for({c0, c1});
    const auto tag = "tower " + std::to_string(k);
    auto cone = transport_cone(G0, G1, f, G0b, c0, G1b, c1, eps);
    check_record_measured(t, cone.record, 8 * eps, tag + " cone");
    auto tower = transport_tower(Tower{{G0, G1}, {f}}, {G0b, G1b}, {c0, c1}, eps);
    check_record_measured(t, tower.record, 8 * eps, tag + " n=1");
    t.check(tower_total(tower.tower) == tower.record.output, tag + ": output is not the tower total");
  }
  return t.outcome();
}

Outcome sums() {
  std::mt19937 rng(1004);
  Tally t;
  for (int k = 0; k < 100; ++k) {
    const int parts = 1 + static_cast<int>(rng() % 4);
    std::vector<TwistedComplex> src, dst;
    std::vector<InterleavingCertificate> certs;
    for (int p = 0; p < parts; ++p) {
      auto A = random_point_complex(rng, 4, 5);
      auto [B, c] = perturb(rng, A);
      src.push_back(A);
      dst.push_back(B);
      certs.push_back(c);
    }
    const Rational eps = eps_for(certs);
    auto r = sum_record(src, dst, certs, eps);
    const auto tag = "sum " + std::to_string(k);
    t.check(replay(r.input, r.output, r.certificate).ok, tag + ": does not replay");
    t.check(r.certificate.cost() <= 2 * eps, tag + ": cost " + to_string(r.certificate.cost()));
  }
  return t.outcome();
}

Outcome gabriel_round_trip() {
  std::mt19937 rng(1005);
  Tally t;
  int finite = 0, infinite = 0;
  for (int k = 0; k < 200; ++k) {
    auto B = to_barcode(random_bars(rng, 10));
    for (const auto& b : B.bars()) (b.death.finite() ? finite : infinite)++;
    auto G = gabriel_decompose(cone_tower_from_barcode(B));
    t.check(G.barcode == B, "barcode " + std::to_string(k));
  }
  return t.outcome(std::to_string(finite) + " finite and " + std::to_string(infinite) + " infinite bars");
}

Outcome stalk_lower_bound() {
  std::mt19937 rng(1006);
  Tally t;
  auto g = path_graph(2);
  for (int k = 0; k < 100; ++k) {
    const bool point = k < 50;
    auto F = point ? random_point_complex(rng, 8, 6) : random_graph_complex(rng, g, 2);
    auto G = point ? random_point_complex(rng, 8, 6) : random_graph_complex(rng, g, 2);
    auto d = distance_exact(F, G);
    const auto tag = std::string(point ? "point pair " : "graph pair ") + std::to_string(k);
    t.check(!d.hit_cap, tag + ": undecided");
    ExtValue best(0);
    for (const auto& s : d.stalks) best = std::max(best, s.interleaving);
    t.check(best <= d.upper, tag + ": stalk bound " + str(best) + " above " + str(d.upper));
    if (point) t.check(best == d.upper, tag + ": stalk bound " + str(best) + " differs from " + str(d.upper));
  }
  return t.outcome("50 on the point base, 50 on a two-edge path");
}

struct CorpusRun {
  std::vector<std::string> reports;  // serialized densify reports, corpus order
};

CorpusRun run_corpus(Tally& t) {
  CorpusRun out;
  for (const auto& e : fixture_corpus()) {
    for (const Rational& eps : {frac(1, 4), frac(1, 8)}) {
      const auto tag = e.name + " at " + to_string(eps);
      try {
        auto r = densify(e.sheaf, eps);
        const Rational bound = 80 * eps;
        t.check(r.layers() == 2, tag + ": " + std::to_string(r.layers()) + " layers");
        bool all_w = r.generators.size() == r.output.size();
        for (const auto& g : r.output.gens()) all_w = all_w && as_w_generator(g).has_value();
        t.check(all_w, tag + ": output has a non-W generator");
        t.check(replay(r.input, r.output, r.certificate).ok, tag + ": certificate does not replay");
        t.check(r.certificate.cost() <= bound, tag + ": cost " + to_string(r.certificate.cost()));
        t.check(r.measured_upper <= ExtValue(bound), tag + ": measured upper " + str(r.measured_upper));
        t.check(check_report(r).ok, tag + ": " + check_report(r).reason);
        auto doc = io::densify_report(r, io::Provenance{"acceptance " + tag});
        t.check(io::verify_document(io::parse_text(io::dump(doc))).ok, tag + ": report does not verify");
        out.reports.push_back(io::dump(doc));
      } catch (const Error& ex) {
        t.check(false, tag + ": " + ex.what());
      }
    }
  }
  return out;
}

CorpusRun single_thread_run;

Outcome end_to_end() {
  Tally t;
  const auto t0 = std::chrono::steady_clock::now();
  omp_set_num_threads(1);
  single_thread_run = run_corpus(t);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  t.check(secs < 300, "runtime " + std::to_string(secs) + " s");
  return t.outcome(std::to_string(fixture_corpus().size()) + " sheaves at epsilon 1/4 and 1/8");
}

Outcome w_geometry() {
  Tally t;
  std::mt19937 rng(1008);
  std::vector<GraphRef> graphs{path_graph(2), cycle_graph(4, frac(1, 2)), path_graph(3, frac(3, 2))};
  for (int k = 0; k < 50; ++k) {
    const auto& g = graphs[k % graphs.size()];
    auto x = random_point(rng, *g), y = random_point(rng, *g);
    auto a = random_rational(rng, 0, 3), b = random_rational(rng, 0, 3);
    auto exact = distance_exact(one_gen(TameFunction::distance_cone(g, x, a)),
                                one_gen(TameFunction::distance_cone(g, y, b)));
    const Rational closed = w_distance(*g, x, a, y, b);
    t.check(exact.mode == DistanceResult::Mode::Exact && exact.upper == ExtValue(closed),
            "closed form " + std::to_string(k) + ": " + to_string(closed) + " vs " + str(exact.upper));
  }
  auto c5 = cycle_graph(5, frac(1, 3));
  for (int k = 0; k < 50; ++k) {
    const Rational eps = k % 2 ? frac(1, 2) : frac(1, 4);
    auto x = random_point(rng, *c5);
    GraphPoint y = x;
    for (int tries = 0; tries < 20; ++tries) {
      y = random_point(rng, *c5);
      if (geodesic_distance(*c5, x, y) < eps) break;
    }
    if (!(geodesic_distance(*c5, x, y) < eps)) y = x;
    auto a = random_rational(rng, 0, 2, 16);
    Rational b = a + eps * frac(static_cast<long>(rng() % 15), 16) * (rng() % 2 ? 1 : -1);
    auto exact = distance_exact(one_gen(TameFunction::distance_cone(c5, x, a)),
                                one_gen(TameFunction::distance_cone(c5, y, b)));
    t.check(exact.upper < ExtValue(Rational(2 * eps)), "nearby pair " + std::to_string(k) + ": " + str(exact.upper));
  }
  return t.outcome();
}

Outcome envelope_algebra() {
  Tally t;
  std::mt19937 rng(1009);
  std::vector<GraphRef> graphs{path_graph(2), cycle_graph(4, frac(1, 2)), cycle_graph(6), path_graph(3, frac(3, 2))};
  for (int k = 0; k < 100; ++k) {
    const auto& g = graphs[k % graphs.size()];
    auto f = random_tame(rng, g);
    Rational s1 = random_rational(rng, 0, 1), s2 = random_rational(rng, 0, 1);
    const auto tag = "function " + std::to_string(k);
    t.check(inf_convolution(inf_convolution(f, s1, 1), s2, 1) == inf_convolution(f, Rational(s1 + s2), 1),
            tag + ": semigroup law");
    try {
      auto p = lipschitz_envelope(f);
      t.check(lipschitz_envelope(p) == p, tag + ": projector not idempotent");
    } catch (const Error& e) {
      t.check(e.kind() == ErrorKind::EmptySheaf, tag + ": " + e.what());
    }
  }
  return t.outcome();
}

Outcome determinism() {
  Tally t;
  omp_set_num_threads(4);
  auto again = run_corpus(t);
  omp_set_num_threads(1);
  t.check(again.reports.size() == single_thread_run.reports.size(), "report count differs");
  for (std::size_t k = 0; k < std::min(again.reports.size(), single_thread_run.reports.size()); ++k)
    t.check(again.reports[k] == single_thread_run.reports[k], "report " + std::to_string(k) + " differs");
  return t.outcome("corpus reports with 1 and 4 threads");
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, isometry},        {2, cone_replacement}, {3, cone_and_tower_transport}, {4, sums},
      {5, gabriel_round_trip}, {6, stalk_lower_bound}, {7, end_to_end}, {8, w_geometry},
      {9, envelope_algebra}, {10, determinism}};
  int failed = 0;
  for (const auto& [id, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (id == 1 && secs >= 60) {
      o.pass = false;
      o.detail += "; runtime over 60 s";
    }
    std::printf("criterion %d: %s (%s; %.1f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}

#include "adlab/divisor.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace adlab {

namespace {

// Smallest k >= v with k == l (mod m).
u128 first_in_class(u128 v, u64 l, u64 m) {
  const u128 target = l % m;
  const u128 cur = v % m;
  return v + (target + m - cur) % m;
}

bool in_class(u128 v, u64 l, u64 m) { return v % m == l % m; }

// Enumerates pairs (u, v) with u^eu v^ev in (lo, hi], u == lu (mod mu),
// v == lv (mod mv). The outer variable v carries the larger exponent so the
// outer loop is the short one. Calls f(u, v, u^eu * v^ev).
struct PairWalk {
  unsigned eu, ev;
  u64 mu, lu, mv, lv;

  template <typename F>
  void run(u128 lo, u128 hi, F&& f) const {
    const u128 v_max = ikth_root(hi, ev);
    for (u128 v = first_in_class(1, lv, mv); v <= v_max; v += mv) {
      const u128 vp = saturating_pow(v, ev);
      const u128 u_hi = floor_scaled_root(hi, v, ev, eu);
      const u128 u_lo = floor_scaled_root(lo, v, ev, eu) + 1;
      for (u128 u = first_in_class(std::max<u128>(u_lo, 1), lu, mu); u <= u_hi; u += mu) {
        f(u, v, saturating_pow(u, eu) * vp);
      }
    }
  }
};

// Walk over (h, r) with n = h^a r^b, choosing the outer variable by exponent.
// Calls f(h, r, n).
template <typename F>
void walk_hr(u128 lo, u128 hi, unsigned a, unsigned b, u64 m1, u64 l1, u64 m2, u64 l2, F&& f) {
  if (a <= b) {
    PairWalk{a, b, m1, l1, m2, l2}.run(lo, hi, [&](u128 h, u128 r, u128 n) { f(h, r, n); });
  } else {
    PairWalk{b, a, m2, l2, m1, l1}.run(lo, hi, [&](u128 r, u128 h, u128 n) { f(h, r, n); });
  }
}

}  // namespace

u64 tau_point(u128 n, const Params& p) {
  if (n == 0) throw std::invalid_argument("tau_point: n must be >= 1");
  // Iterate the factor carrying the larger exponent; test the cofactor exactly.
  const bool outer_is_second = p.a <= p.b;
  const unsigned eo = outer_is_second ? p.b : p.a;
  const unsigned ei = outer_is_second ? p.a : p.b;
  const u64 mo = outer_is_second ? p.m2 : p.m1;
  const u64 lo = outer_is_second ? p.l2 : p.l1;
  const u64 mi = outer_is_second ? p.m1 : p.m2;
  const u64 li = outer_is_second ? p.l1 : p.l2;

  u64 count = 0;
  const u128 v_max = ikth_root(n, eo);
  for (u128 v = first_in_class(1, lo, mo); v <= v_max; v += mo) {
    const u128 vp = saturating_pow(v, eo);
    if (n % vp != 0) continue;
    const u128 q = n / vp;
    const u128 u = ikth_root(q, ei);
    if (saturating_pow(u, ei) == q && in_class(u, li, mi)) ++count;
  }
  return count;
}

std::vector<std::uint32_t> tau_segment(u64 offset, u64 length, const Params& p) {
  std::vector<std::uint32_t> counts(length, 0);
  if (length == 0) return counts;
  const u128 lo = offset;
  const u128 hi = static_cast<u128>(offset) + length;
  walk_hr(lo, hi, p.a, p.b, p.m1, p.l1, p.m2, p.l2,
          [&](u128, u128, u128 n) { ++counts[static_cast<std::size_t>(n - lo - 1)]; });
  return counts;
}

std::vector<std::uint32_t> tau_sieve(u64 nmax, const Params& p, unsigned threads, u64 segment) {
  if (nmax >= (u64{1} << 40)) throw BudgetError("tau_sieve: nmax exceeds the index budget (2^40)");
  if (segment == 0) throw std::invalid_argument("tau_sieve: segment must be positive");
  std::vector<std::uint32_t> out(nmax + 1, 0);
  const u64 n_segments = (nmax + segment - 1) / segment;
  std::atomic<u64> next{0};
  auto worker = [&] {
    for (u64 s = next++; s < n_segments; s = next++) {
      const u64 off = s * segment;
      const u64 len = std::min(segment, nmax - off);
      const auto seg = tau_segment(off, len, p);
      std::copy(seg.begin(), seg.end(), out.begin() + static_cast<std::ptrdiff_t>(off + 1));
    }
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<u64>(n_segments, 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

namespace {

template <typename T>
void put_le(std::ostream& os, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    os.put(static_cast<char>(static_cast<std::uint64_t>(v) >> (8 * i) & 0xff));
  }
}

template <typename T>
T get_le(std::istream& is) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error("sieve dump: truncated input");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return static_cast<T>(v);
}

std::uint32_t narrow32(u64 v, const char* what) {
  if (v > 0xffffffffULL) throw std::invalid_argument(std::string("sieve dump: ") + what + " exceeds u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

void write_sieve_dump(std::ostream& os, const Params& p, u64 offset,
                      const std::vector<std::uint32_t>& counts) {
  if (p.a > 0xff || p.b > 0xff) throw std::invalid_argument("sieve dump: exponent exceeds u8");
  os.write("ADLB", 4);
  put_le<std::uint16_t>(os, 1);
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(p.a));
  put_le<std::uint8_t>(os, static_cast<std::uint8_t>(p.b));
  put_le<std::uint32_t>(os, narrow32(p.m1, "M1"));
  put_le<std::uint32_t>(os, narrow32(p.m2, "M2"));
  put_le<std::uint32_t>(os, narrow32(p.l1, "l1"));
  put_le<std::uint32_t>(os, narrow32(p.l2, "l2"));
  put_le<std::uint64_t>(os, offset);
  put_le<std::uint64_t>(os, counts.size());
  for (std::uint32_t c : counts) put_le<std::uint32_t>(os, c);
}

SieveDump read_sieve_dump(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::string(magic, 4) != "ADLB") {
    throw std::runtime_error("sieve dump: bad magic");
  }
  SieveDump d;
  d.header.version = get_le<std::uint16_t>(is);
  if (d.header.version != 1) throw std::runtime_error("sieve dump: unsupported version");
  d.header.a = get_le<std::uint8_t>(is);
  d.header.b = get_le<std::uint8_t>(is);
  d.header.m1 = get_le<std::uint32_t>(is);
  d.header.m2 = get_le<std::uint32_t>(is);
  d.header.l1 = get_le<std::uint32_t>(is);
  d.header.l2 = get_le<std::uint32_t>(is);
  d.header.offset = get_le<std::uint64_t>(is);
  d.header.length = get_le<std::uint64_t>(is);
  d.counts.resize(d.header.length);
  for (auto& c : d.counts) c = get_le<std::uint32_t>(is);
  return d;
}

WeightExponents weight_exponents(unsigned a, unsigned b) {
  const double s = 2.0 * (a + b);
  return {(a + 2.0 * b) / s, (2.0 * a + b) / s};
}

std::vector<Decomposition> decompositions(u128 n, unsigned a, unsigned b) {
  if (n == 0) throw std::invalid_argument("decompositions: n must be >= 1");
  const auto [he, re] = weight_exponents(a, b);
  std::vector<Decomposition> out;
  walk_hr(n - 1, n, a, b, 1, 1, 1, 1, [&](u128 h, u128 r, u128) {
    const double hd = static_cast<double>(h);
    const double rd = static_cast<double>(r);
    out.push_back({static_cast<u64>(h), static_cast<u64>(r), std::pow(hd, -he) * std::pow(rd, -re)});
  });
  std::sort(out.begin(), out.end(), [](const Decomposition& x, const Decomposition& y) { return x.h < y.h; });
  return out;
}

DecompositionSum g_ab(u128 n, const Params& p) {
  DecompositionSum s;
  s.witnesses = decompositions(n, p.a, p.b);
  CompensatedSum acc;
  for (const auto& d : s.witnesses) acc.add(d.weight);
  s.value = acc.value();
  return s;
}

double congruence_phase(u64 h, u64 r, const Params& p) {
  // (h l1 mod M1)/M1 + (r l2 mod M2)/M2 as one exact fraction over M1 M2.
  const u128 mm = static_cast<u128>(p.m1) * p.m2;
  const u128 num = (static_cast<u128>(h % p.m1) * p.l1 % p.m1) * p.m2 +
                   (static_cast<u128>(r % p.m2) * p.l2 % p.m2) * p.m1;
  return static_cast<double>(num % mm) / static_cast<double>(mm);
}

DecompositionSum g_star(u128 n, const Params& p) {
  DecompositionSum s;
  s.witnesses = decompositions(n, p.a, p.b);
  CompensatedSum acc;
  for (const auto& d1 : s.witnesses) {
    for (const auto& d2 : s.witnesses) {
      // Phase (r2 - r1) l2/M2 + (h2 - h1) l1/M1, reduced exactly mod 1.
      const double f = congruence_phase(d2.h, d2.r, p) - congruence_phase(d1.h, d1.r, p);
      acc.add(d1.weight * d2.weight * std::cos(2.0 * std::numbers::pi * f));
    }
  }
  s.value = acc.value();
  return s;
}

namespace {

constexpr u64 kWeightCache = u64{1} << 22;

// Walks all (h, r) with h^a r^b in (lo, hi] and hands each weight to f(n, h, r, w).
template <typename F>
void walk_weights(u64 lo, u64 hi, unsigned a, unsigned b, F&& f) {
  const auto [he, re] = weight_exponents(a, b);
  if (a <= b) {
    // Outer r; inner h dense, so cache h^{-he}.
    const u64 h_cap = std::min<u64>(static_cast<u64>(ikth_root(hi, a)), kWeightCache);
    std::vector<double> hw(h_cap + 1);
    for (u64 h = 1; h <= h_cap; ++h) hw[h] = std::pow(static_cast<double>(h), -he);
    u128 last_r = 0;
    double rw = 1.0;
    walk_hr(lo, hi, a, b, 1, 1, 1, 1, [&](u128 h, u128 r, u128 n) {
      if (r != last_r) {
        last_r = r;
        rw = std::pow(static_cast<double>(r), -re);
      }
      const double w = h <= h_cap ? hw[static_cast<std::size_t>(h)] : std::pow(static_cast<double>(h), -he);
      f(static_cast<u64>(n), static_cast<u64>(h), static_cast<u64>(r), w * rw);
    });
  } else {
    const u64 r_cap = std::min<u64>(static_cast<u64>(ikth_root(hi, b)), kWeightCache);
    std::vector<double> rw(r_cap + 1);
    for (u64 r = 1; r <= r_cap; ++r) rw[r] = std::pow(static_cast<double>(r), -re);
    u128 last_h = 0;
    double hw = 1.0;
    walk_hr(lo, hi, a, b, 1, 1, 1, 1, [&](u128 h, u128 r, u128 n) {
      if (h != last_h) {
        last_h = h;
        hw = std::pow(static_cast<double>(h), -he);
      }
      const double w = r <= r_cap ? rw[static_cast<std::size_t>(r)] : std::pow(static_cast<double>(r), -re);
      f(static_cast<u64>(n), static_cast<u64>(h), static_cast<u64>(r), hw * w);
    });
  }
}

}  // namespace

std::vector<double> g_table(u64 x, unsigned a, unsigned b) {
  std::vector<double> g(x + 1, 0.0);
  walk_weights(0, x, a, b, [&](u64 n, u64, u64, double w) { g[n] += w; });
  return g;
}

std::vector<double> g_star_table(u64 x, const Params& p) {
  std::vector<std::complex<double>> acc(x + 1);
  const u128 mm = static_cast<u128>(p.m1) * p.m2;
  std::vector<std::complex<double>> roots;
  if (mm <= (1u << 20)) {
    roots.resize(static_cast<std::size_t>(mm));
    for (std::size_t k = 0; k < roots.size(); ++k) {
      roots[k] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(mm));
    }
  }
  walk_weights(0, x, p.a, p.b, [&](u64 n, u64 h, u64 r, double w) {
    if (!roots.empty()) {
      const u128 num = (static_cast<u128>(h % p.m1) * p.l1 % p.m1) * p.m2 +
                       (static_cast<u128>(r % p.m2) * p.l2 % p.m2) * p.m1;
      acc[n] += w * roots[static_cast<std::size_t>(num % mm)];
    } else {
      acc[n] += std::polar(w, 2.0 * std::numbers::pi * congruence_phase(h, r, p));
    }
  });
  std::vector<double> out(x + 1, 0.0);
  for (u64 n = 1; n <= x; ++n) out[n] = std::norm(acc[n]);
  return out;
}

double g_partial_sum(u64 x, const Params& p, bool weighted) {
  const auto g = g_table(x, p.a, p.b);
  const double e = 1.0 / (2.0 * (p.a + p.b));
  CompensatedSum acc;
  for (u64 n = 1; n <= x; ++n) {
    acc.add(weighted ? g[n] * std::pow(static_cast<double>(n), -e) : g[n]);
  }
  return acc.value();
}

double g_sq_range_sum(u64 lo, u64 hi, unsigned a, unsigned b) {
  if (hi <= lo) return 0.0;
  constexpr u64 kChunk = u64{1} << 22;
  CompensatedSum total;
  std::vector<double> buf;
  for (u64 c_lo = lo; c_lo < hi; c_lo += kChunk) {
    const u64 c_hi = std::min(hi, c_lo + kChunk);
    buf.assign(c_hi - c_lo, 0.0);
    walk_weights(c_lo, c_hi, a, b, [&](u64 n, u64, u64, double w) { buf[n - c_lo - 1] += w; });
    for (double g : buf) total.add(g * g);
  }
  return total.value();
}

double g_tail_exponent(unsigned a, unsigned b) {
  return static_cast<double>(a) / (static_cast<double>(a + b) * b);
}

double g_tail_constant(unsigned a, unsigned b) {
  static std::mutex mu;
  static std::map<std::pair<unsigned, unsigned>, double> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({a, b});
    if (it != cache.end()) return it->second;
  }
  const double alpha = g_tail_exponent(a, b);
  double worst = 0.0;
  for (u64 y : {u64{100}, u64{1000}, u64{10000}}) {
    const double tail = g_sq_range_sum(y, 1'000'000, a, b);
    worst = std::max(worst, tail * std::pow(static_cast<double>(y), alpha));
  }
  const double c = 2.0 * worst;
  std::lock_guard<std::mutex> lock(mu);
  cache[{a, b}] = c;
  return c;
}

SeriesBracket g_tail_bracket(double y, const Params& p, u64 range_factor) {
  if (!(y >= 1.0)) throw std::invalid_argument("g_tail_bracket: y must be >= 1");
  if (range_factor < 1) throw std::invalid_argument("g_tail_bracket: range factor must be >= 1");
  const double alpha = g_tail_exponent(p.a, p.b);
  const u64 y0 = static_cast<u64>(std::floor(y));
  const double span = std::min(static_cast<double>(y0) * static_cast<double>(range_factor - 1),
                               static_cast<double>(kMaxTailEntries));
  const u64 y1 = y0 + static_cast<u64>(span);

  SeriesBracket br;
  br.value = g_sq_range_sum(y0, y1, p.a, p.b);
  br.lower = br.value;
  br.upper = std::max(br.value, g_tail_constant(p.a, p.b) * std::pow(y, -alpha));
  br.terms_used = static_cast<std::int64_t>(y1 - y0);
  br.tail_exponent = alpha;
  return br;
}

}  // namespace adlab

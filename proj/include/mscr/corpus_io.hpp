#pragma once

#include <cstdint>
#include <string>

#include "mscr/core.hpp"

namespace mscr {

// Small deterministic RNG used everywhere randomness is needed, so corpora
// and animat runs are byte-reproducible across platforms (the standard
// distributions are implementation-defined).
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}
  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, n), n > 0.
  uint64_t below(uint64_t n) { return next() % n; }
  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  uint64_t state_;
};

// Duplicates every glyph `copies` times, resamples each pixel independently
// with probability `noise_rate` to a uniformly chosen different value, and
// applies a seeded shuffle. Provenance records all parameters.
Corpus gen_glyph_corpus(const GlyphSet& g, int copies, double noise_rate,
                        uint64_t seed);

void save_corpus(const Corpus& c, const std::string& path);
Corpus load_corpus(const std::string& path);

// Same text format as corpora, with "# grid: W H" and "# glyph: name" lines.
void save_glyphs(const GlyphSet& g, const std::string& path);
GlyphSet load_glyphs(const std::string& path);

// Shipped assets: ten digits and six letters on a 5x7 binary-pixel grid.
GlyphSet builtin_digits();
GlyphSet builtin_letters();

}  // namespace mscr

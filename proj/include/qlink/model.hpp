#pragma once

#include <cmath>
#include <string>

#include "qlink/error.hpp"

namespace qlink {

enum class GaugeGroup { U1, U2 };
enum class RishonStatistics { BosonicTruncated, Fermionic };
enum class MatterKind { SpinlessFermion, SpinHalfFermion };

inline std::string to_string(GaugeGroup g) { return g == GaugeGroup::U1 ? "U1" : "U2"; }
inline std::string to_string(RishonStatistics s) {
  return s == RishonStatistics::BosonicTruncated ? "bosonic-truncated" : "fermionic";
}
inline std::string to_string(MatterKind m) {
  return m == MatterKind::SpinlessFermion ? "spinless-fermion" : "spinhalf-fermion";
}

struct HamiltonianParams {
  double hopping = 1.0;        // J (U1) / t (U2)
  double mass_stag = 0.0;      // staggered mass coefficient m
  double g2_abelian = 0.0;     // abelian electric coupling g^2
  double g2_nonabelian = 0.0;  // non-abelian electric coupling, U2 only
};

// Per-vertex target for n_psi + n_- + n_+, by 1-based site parity.
struct ParticleNumberRule {
  int odd = 0;
  int even = 0;
  bool uniform() const { return odd == even; }
  int at(int x) const { return (x % 2 == 1) ? odd : even; }
};

// Declarative description of a one-dimensional quantum link model with open
// boundaries: gauge group, rishons per link, statistics, matter content,
// staggered filling rule and couplings.
struct GaugeModelSpec {
  GaugeGroup group = GaugeGroup::U1;
  int nbar = 1;  // rishons per link
  RishonStatistics statistics = RishonStatistics::BosonicTruncated;
  MatterKind matter = MatterKind::SpinlessFermion;
  int length = 2;  // number of vertices L
  ParticleNumberRule filling;
  HamiltonianParams couplings;

  int colors() const { return group == GaugeGroup::U1 ? 1 : 2; }

  // Maximum occupation of a single rishon mode group (one link end): the link
  // constraint makes anything above nbar unreachable, and fermionic modes hold
  // at most one rishon per color.
  int end_capacity() const {
    const int hard = statistics == RishonStatistics::Fermionic ? colors() : nbar;
    return std::min(nbar, hard);
  }

  int target_occupation(int x) const { return filling.at(x); }

  void validate() const {
    if (length < 2) throw ConfigError("chain length must be at least 2");
    if (nbar < 1) throw ConfigError("nbar must be at least 1");
    if (group == GaugeGroup::U1 && matter != MatterKind::SpinlessFermion)
      throw ConfigError("U1 models use spinless-fermion matter");
    if (group == GaugeGroup::U2 && matter != MatterKind::SpinHalfFermion)
      throw ConfigError("U2 models use spinhalf-fermion matter");
    if (group == GaugeGroup::U2 && statistics != RishonStatistics::Fermionic)
      throw ConfigError("U2 models are implemented with fermionic rishons");
    if (statistics == RishonStatistics::Fermionic && nbar > 2 * colors())
      throw ConfigError("fermionic rishons cap nbar at 2*(number of colors)");
    if (group == GaugeGroup::U1 && couplings.g2_nonabelian != 0.0)
      throw ConfigError("g2_nonabelian must be 0 for U1 models");
    if (!std::isfinite(couplings.hopping) || !std::isfinite(couplings.mass_stag) ||
        !std::isfinite(couplings.g2_abelian) || !std::isfinite(couplings.g2_nonabelian))
      throw ConfigError("couplings must be finite");
    if (filling.odd < 0 || filling.even < 0)
      throw ConfigError("particle_number_rule must be non-negative");
  }

  static ParticleNumberRule default_filling(GaugeGroup g, int nbar) {
    if (g == GaugeGroup::U1) return {nbar + 1, nbar};
    if (nbar == 1) return {2, 2};
    if (nbar == 2) return {4, 2};  // 3 - (-1)^x
    throw ConfigError("no default particle_number_rule for U2 with nbar=" + std::to_string(nbar) +
                      "; set one explicitly");
  }

  static GaugeModelSpec u1(int nbar, int length, HamiltonianParams params = {},
                           RishonStatistics stats = RishonStatistics::BosonicTruncated) {
    GaugeModelSpec s;
    s.group = GaugeGroup::U1;
    s.nbar = nbar;
    s.statistics = stats;
    s.matter = MatterKind::SpinlessFermion;
    s.length = length;
    s.filling = default_filling(GaugeGroup::U1, nbar);
    s.couplings = params;
    s.validate();
    return s;
  }

  static GaugeModelSpec u2(int nbar, int length, HamiltonianParams params = {}) {
    GaugeModelSpec s;
    s.group = GaugeGroup::U2;
    s.nbar = nbar;
    s.statistics = RishonStatistics::Fermionic;
    s.matter = MatterKind::SpinHalfFermion;
    s.length = length;
    s.filling = default_filling(GaugeGroup::U2, nbar);
    s.couplings = params;
    s.validate();
    return s;
  }
};

}  // namespace qlink

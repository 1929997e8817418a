#include "hww/popctrl.hpp"

#include <stdexcept>

namespace hww {

CombResult uniform_comb(const ParticleBank& bank, std::size_t target, RngStream& rng) {
  if (bank.empty()) throw std::invalid_argument("cannot comb an empty bank");
  if (target < 1) throw std::invalid_argument("comb target must be positive");

  CombResult result;
  result.input_count = bank.size();
  result.input_weight = total_weight(bank);

  const double spacing = result.input_weight / static_cast<double>(target);
  const double offset = rng.uniform() * spacing;

  result.bank.reserve(target);
  double cumulative = 0.0;
  std::size_t tooth = 0;
  for (const auto& p : bank) {
    cumulative += p.w;
    // Emit every tooth that falls inside this particle's weight interval.
    while (tooth < target && offset + static_cast<double>(tooth) * spacing < cumulative) {
      Particle copy = p;
      copy.w = spacing;
      result.bank.push_back(copy);
      ++tooth;
    }
  }
  // Round-off on the cumulative axis can strand the last tooth.
  while (tooth < target) {
    Particle copy = bank.back();
    copy.w = spacing;
    result.bank.push_back(copy);
    ++tooth;
  }

  result.output_count = result.bank.size();
  result.output_weight = total_weight(result.bank);
  return result;
}

}  // namespace hww

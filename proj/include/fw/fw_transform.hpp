#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fw/operator_algebra.hpp"

namespace fw {

/// Hermitian generator S of one conjugation exp(iS) H exp(−iS).
struct FWGenerator {
  OperatorSum generator;
  int stage = 1;

  /// Highest c exponent present; empty generator reports nothing.
  std::optional<int> c_degree() const { return generator.max_c_degree(); }
  bool is_zero() const { return generator.is_zero(); }
};

class NotPurelyOdd : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OddResidue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Products discarded by grading while conjugating in one stage, at one nesting depth k.
struct DroppedEntry {
  int stage = 0;
  int nesting = 0;
  int c_degree = 0;
  long count = 0;
};

struct ExpansionReport {
  std::vector<OperatorSum> stage_outputs;
  std::vector<FWGenerator> generators;
  std::vector<DroppedEntry> dropped;
  /// Fully multiplied-out even Hamiltonian.
  OperatorSum expanded;
  /// Same operator with the O⁴ contribution held as −β(1/2mc²)[O²/2mc²]².
  OperatorSum even_hamiltonian;
};

struct FWOptions {
  int k_max = 5;
  int min_c_degree = -2;
  int stages = 3;
};

/// S = (−i/2mc²) β · odd. Throws NotPurelyOdd if `odd` has an even part.
FWGenerator generator_from_odd(const OperatorSum& odd, int stage = 1);

/// Σ_{k=0}^{k_max} ad_{iS}^k(H)/k!, truncated to c_degree >= min_c_degree.
OperatorSum bch_conjugate(const OperatorSum& h, const FWGenerator& s, int k_max, int min_c_degree = -2,
                          std::vector<DroppedEntry>* dropped = nullptr);

/// Three conjugations removing odd operators to the requested order. `h` must have the
/// shape βmc² + even + O; its O part seeds the first generator.
ExpansionReport fw_reduce(const OperatorSum& h, const FWOptions& options = {});

enum class Branch { upper, lower };

/// β → ±1 and Σ_k → σ_k. Throws OddResidue if the report's Hamiltonian is not even.
OperatorSum two_component(const ExpansionReport& report, Branch branch);
OperatorSum two_component(const OperatorSum& even_hamiltonian, Branch branch);

/// Rewrites the normal-ordered spin-orbit piece σ·(E×Π) into the symmetric
/// (1/2)σ·(E×Π − Π×E) form. Only valid under curl_free_E; returns the coefficient
/// found on the symmetric form.
struct SpinOrbitForms {
  ConstantMonomial cross_form;      // coefficient of σ·(E×Π)
  ConstantMonomial symmetric_form;  // coefficient of σ·(E×Π − Π×E)
};

/// One physically named piece of a two-component Hamiltonian.
struct NamedTerm {
  std::string name;
  OperatorSum value;
  /// Grouped rendering such as "(eħ/4m²c²) σ·(E×Π)"; empty if no grouping applies.
  std::string pretty;
};

/// Partitions a two-component Hamiltonian into rest energy, potential, kinetic,
/// Zeeman, mass-velocity square, spin-orbit, Darwin and anything left over.
/// The pieces always add back up to the input.
std::vector<NamedTerm> identify_terms(const OperatorSum& two_component_hamiltonian);

/// Coefficients of the spin-orbit piece of a two-component Hamiltonian in both the
/// E×Π form and the symmetric E×Π − Π×E form; nullopt if the piece is not of that shape.
std::optional<SpinOrbitForms> spin_orbit_forms(const OperatorSum& spin_orbit_piece);

}  // namespace fw

// Audits a cutoff mechanism twice: once when the agent may only undersell
// (passes), once with unrestricted messages (fails, with a witness).

#include <iostream>

#include "projsel/projsel.hpp"

int main() {
  using namespace projsel;
  const auto mech = GridMechanism::from_table(cutoff_to_grid(CutoffVector({0.5}), 5));

  std::cout << "no overselling:  " << to_json(audit_ic(mech)).dump() << '\n';
  std::cout << "unrestricted:    " << to_json(audit_unrestricted(mech)).dump() << '\n';

  const auto extracted = extract_table_structure(mech);
  std::cout << "table structure recovered: " << std::boolalpha << extracted.ok() << '\n';
}

#pragma once

#include <string>

#include "gaitsim/biped.hpp"
#include "gaitsim/contact.hpp"

namespace gaitsim {

// Plain-text model description, one record per line, first token is the
// record key. The first line is a version header ("gaitsim-model v1");
// loading rejects unknown versions, unknown keys, and malformed records.
//
//   gaitsim-model v1
//   subject <id> <sex> <mass_kg> <height_cm> <age> <speed_mps>
//   param <name> <value>                          # 12 lines, ParamVector order
//   gravity <gx> <gz>
//   limit_stop <stiffness> <damping>
//   segment <name> <mass> <length> <com_x> <com_z> <inertia>
//   tree <child> <parent> <anchor_x> <anchor_z>   # per joint
//   joint <index> <damping> <torque_limit> <lo> <hi>
//   gains <index> <kp> <kd>
//   contact_point <body> <x> <z>
//   contact <stiffness> <exponent> <dissipation> <friction_coeff> <v_reg>
//   leg_length <value>
//   standing_base_z <value>
struct ModelFile {
  Biped biped;
  ContactParams contact;
};

void save_model(const std::string& path, const Biped& biped,
                const ContactParams& contact);
ModelFile load_model(const std::string& path);

struct ModelIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gaitsim

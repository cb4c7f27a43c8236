#pragma once

#include <stdexcept>
#include <string>

namespace gaitsim {

// Physical characteristics of one study participant.
struct SubjectSpec {
  int id = 0;
  std::string sex = "M";
  double mass = 74.0;       // kg
  double height_cm = 172.4;
  int age = 25;
  double speed = 1.25;      // preferred walking speed, m/s

  double height_m() const { return height_cm / 100.0; }

  void validate() const {
    if (id <= 0) throw std::invalid_argument("SubjectSpec: id must be positive");
    if (mass <= 0.0 || height_cm <= 0.0 || age <= 0 || speed <= 0.0)
      throw std::invalid_argument("SubjectSpec: fields must be positive");
    if (speed >= 3.0) throw std::invalid_argument("SubjectSpec: speed must be < 3 m/s");
  }
};

}  // namespace gaitsim

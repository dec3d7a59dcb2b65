#pragma once

namespace loopcorr {

enum class Realization { A, K };
enum class Sector { Nonunitary, Unitary };

inline const char* realization_name(Realization r) { return r == Realization::A ? "A" : "K"; }
inline const char* sector_name(Sector s) { return s == Sector::Unitary ? "unitary" : "nonunitary"; }

}  // namespace loopcorr

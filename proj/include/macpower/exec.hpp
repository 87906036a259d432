#pragma once

namespace macpower {

/// Selects between the plain loop (kept as the reference) and the OpenMP
/// kernel. Both paths produce bit-identical results.
enum class Exec { Serial, Parallel };

}  // namespace macpower

#pragma once

namespace mlcd {

/// Selects between the OpenMP kernel and its serial reference.
///
/// Both paths produce bit-identical results; the serial path is the one the
/// tests treat as ground truth.
enum class Exec { serial, parallel };

}  // namespace mlcd

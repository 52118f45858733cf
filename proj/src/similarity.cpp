#include "intent/similarity.hpp"

#include "intent/movement.hpp"

namespace intent {

// The action ensemble only ever compares movement sequences.
template double similarity<Movement>(std::span<const Movement>, std::span<const Movement>);

}  // namespace intent

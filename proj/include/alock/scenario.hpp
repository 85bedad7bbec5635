#pragma once

#include <string>
#include <vector>

namespace alock {

// Named, fully deterministic demonstration runs for the trace subcommand.
// Each returns the complete annotated step log: `# frame N` markers, one line
// per memory step, and state dumps of the lock record and the participating
// descriptors after each frame.
std::vector<std::string> scenario_names();

// Unknown name throws std::invalid_argument.
std::string scenario_trace(const std::string& name);

// The canonical two-actor hand-off walk-through ("fig2"): two nodes, one lock
// on the second node, the remote-side actor acquires first and the co-located
// actor contends through the tie-break until the release hands over.
std::string walkthrough_trace();

}  // namespace alock

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "jdst/model.hpp"

namespace jdst {

// Parses a REPL system-act line: acts separated by commas or spaces, each
// `name`, `name(slot)` or `name(slot=value)`, e.g.
// "offer(time=6 pm), request(date) greeting". Throws on malformed input.
std::vector<SystemAct> parse_sys_acts(const std::string& line);

// Interactive session against a loaded checkpoint. Commands:
//   sys <act>[(slot[=value])]...   queue system acts for the next turn
//   reset                          back to the t=1 condition
//   quit / EOF                     leave
// Any other non-empty line is a user utterance; the turn is processed with
// the queued system acts and the predictions are printed (intent, acts, IOB
// tags, decoded values, full scored state). Shares the inference path with
// batch evaluation.
int run_repl(const JointModel& model, std::istream& in, std::ostream& out);

}  // namespace jdst

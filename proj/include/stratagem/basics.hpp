#ifndef STRATAGEM_BASICS_HPP
#define STRATAGEM_BASICS_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stratagem {

// Basic values live in the single flat ground domain N⊥; booleans are
// embedded as true = 1, false = 0.
using Nat = std::uint64_t;

// A prompt (computation history): the finite sequence of Oracle answers
// received so far by one strategy.
using Prompt = std::vector<Nat>;
using PromptView = std::span<const Nat>;

std::string prompt_to_string(PromptView w);

inline Prompt prompt_of(std::initializer_list<Nat> vs) { return Prompt(vs); }

}  // namespace stratagem

#endif

#pragma once

namespace oracle {

// Reference outputs of the original Porter algorithm for words from its
// published test vocabulary.
struct StemPair {
  const char* word;
  const char* stem;
};

inline constexpr StemPair kPorterPairs[] = {
    {"caresses", "caress"}, {"ponies", "poni"},       {"ties", "ti"},         {"caress", "caress"},
    {"cats", "cat"},        {"feed", "feed"},         {"plastered", "plaster"}, {"motoring", "motor"},
    {"sing", "sing"},       {"conflated", "conflat"}, {"hopping", "hop"},     {"sized", "size"},
    {"falling", "fall"},    {"filing", "file"},       {"happy", "happi"},     {"sky", "sky"},
    {"relational", "relat"}, {"conditional", "condit"}, {"generalizations", "gener"},
    {"oscillators", "oscil"},
};

}  // namespace oracle

#include "findbench/word_list.hpp"

namespace findbench {

const std::vector<std::string>& common_words() {
  static const std::vector<std::string> kWords = {
      "apple",   "banana", "cat",     "dog",     "house",   "river",   "stone",  "cloud",
      "light",   "music",  "garden",  "window",  "bridge",  "forest",  "silver", "candle",
      "monkey",  "orange", "purple",  "yellow",  "rocket",  "planet",  "magnet", "castle",
      "dragon",  "flower", "guitar",  "hammer",  "island",  "jungle",  "kettle", "ladder",
      "mirror",  "needle", "ocean",   "pencil",  "quartz",  "rabbit",  "sunset", "tunnel",
      "violet",  "walnut", "zebra",   "anchor",  "basket",  "circle",  "desert", "engine",
      "falcon",  "goblet", "helmet",  "insect",  "jacket",  "kitten",  "lantern", "meadow",
      "nutmeg",  "oyster", "parrot",  "quiver",  "ribbon",  "saddle",  "temple", "umbrella",
      "velvet",  "wizard", "yogurt",  "zipper",  "breeze",  "copper",  "dimple", "ember",
      "frost",   "glacier", "harbor", "ivory",   "jigsaw",  "karma",   "lemon",  "mango",
  };
  return kWords;
}

const std::vector<std::string>& identity_probe_set() {
  // 50 fixed strings: varied lengths, repeats, palindromes, and every
  // letter of the alphabet somewhere in the set.
  static const std::vector<std::string> kProbes = {
      "apple",    "banana",   "cat",     "dog",      "a",        "ab",      "abc",
      "abcd",     "abcde",    "zz",      "racecar",  "level",    "noon",    "xyz",
      "hello",    "world",    "mississippi",         "aaa",      "abab",    "quartz",
      "jackpot",  "wave",     "kite",    "lamp",     "vex",      "fuzzy",   "gybe",
      "crwth",    "sphinx",   "quick",   "brown",    "fox",      "jumps",   "over",
      "lazy",     "dogs",     "pack",    "my",       "box",      "with",    "five",
      "dozen",    "liquor",   "jugs",    "zebra",    "yak",      "unique",  "deed",
      "otto",     "stats",
  };
  return kProbes;
}

}  // namespace findbench

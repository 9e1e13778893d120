#include "wlmsc/corpusgen.hpp"

#include <array>
#include <string>

#include "wlmsc/rng.hpp"

namespace wlmsc {

namespace {

template <size_t N>
const char* pick(Rng& rng, const std::array<const char*, N>& options) {
  return options[rng.next_below(N)];
}

constexpr std::array<const char*, 12> kNumbers = {
    "two",    "three", "five",   "ten",    "fifteen", "twenty",
    "thirty", "forty", "fifty",  "sixty",  "ninety",  "seven"};
constexpr std::array<const char*, 3> kUnits = {"second", "minute", "hour"};
constexpr std::array<const char*, 10> kCities = {
    "boston",  "denver", "austin",  "seattle", "portland",
    "chicago", "dallas", "phoenix", "atlanta", "miami"};
constexpr std::array<const char*, 8> kNames = {"alex",  "jordan", "taylor", "sam",
                                               "casey", "robin",  "morgan", "jamie"};
constexpr std::array<const char*, 6> kRooms = {"kitchen", "bedroom", "garage",
                                               "office",  "hallway", "basement"};
constexpr std::array<const char*, 10> kTasks = {
    "call mom",         "buy milk",        "water the plants", "feed the cat",
    "check the oven",   "pay the rent",    "take the medicine", "walk the dog",
    "charge the phone", "book a table"};
constexpr std::array<const char*, 6> kGenres = {"jazz",    "rock", "classical",
                                                "country", "folk", "blues"};
constexpr std::array<const char*, 5> kPrefixes = {"", "please", "hey", "can you",
                                                  "could you please"};
constexpr std::array<const char*, 5> kSuffixes = {"", "please", "now", "for me",
                                                  "right away"};

std::string timer_phrase(Rng& rng) {
  const char* num = pick(rng, kNumbers);
  const char* unit = pick(rng, kUnits);
  switch (rng.next_below(4)) {
    case 0: return std::string("set a timer for ") + num + " " + unit + "s";
    case 1: return std::string("start a ") + num + " " + unit + " timer";
    case 2: return std::string("cancel the ") + num + " " + unit + " timer";
    default: return std::string("delete the ") + num + " " + unit + " timer";
  }
}

std::string alarm_phrase(Rng& rng) {
  const char* num = pick(rng, kNumbers);
  switch (rng.next_below(3)) {
    case 0: return std::string("set an alarm for ") + num + " thirty";
    case 1: return std::string("wake me up at ") + num + " fifteen";
    default: return "turn off the morning alarm";
  }
}

std::string reminder_phrase(Rng& rng) {
  const char* task = pick(rng, kTasks);
  if (rng.next_below(2) == 0) {
    return std::string("remind me to ") + task + " tomorrow";
  }
  return std::string("add ") + task + " to my list";
}

std::string weather_phrase(Rng& rng) {
  const char* city = pick(rng, kCities);
  switch (rng.next_below(3)) {
    case 0: return std::string("what is the weather in ") + city + " today";
    case 1: return std::string("will it rain in ") + city + " tomorrow";
    default: return std::string("how cold is it in ") + city + " right now";
  }
}

std::string music_phrase(Rng& rng) {
  switch (rng.next_below(4)) {
    case 0: return std::string("play some ") + pick(rng, kGenres) + " music";
    case 1: return "skip to the next song";
    case 2: return "turn the volume down a little";
    default: return std::string("play the new ") + pick(rng, kGenres) + " album";
  }
}

std::string lights_phrase(Rng& rng) {
  const char* room = pick(rng, kRooms);
  switch (rng.next_below(3)) {
    case 0: return std::string("turn the ") + room + " lights on";
    case 1: return std::string("turn the ") + room + " lights off";
    default: return std::string("dim the ") + room + " lights";
  }
}

std::string message_phrase(Rng& rng) {
  const char* name = pick(rng, kNames);
  switch (rng.next_below(3)) {
    case 0: return std::string("send a message to ") + name;
    case 1: return std::string("call ") + name + " on the phone";
    default: return std::string("tell ") + name + " i am running late";
  }
}

}  // namespace

std::vector<std::string> generate_toy_corpus(size_t count, uint64_t seed) {
  std::vector<std::string> lines;
  lines.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, "line", i));
    std::string body;
    switch (rng.next_below(7)) {
      case 0: body = timer_phrase(rng); break;
      case 1: body = alarm_phrase(rng); break;
      case 2: body = reminder_phrase(rng); break;
      case 3: body = weather_phrase(rng); break;
      case 4: body = music_phrase(rng); break;
      case 5: body = lights_phrase(rng); break;
      default: body = message_phrase(rng); break;
    }
    const char* prefix = pick(rng, kPrefixes);
    const char* suffix = pick(rng, kSuffixes);
    std::string line;
    if (*prefix) line = std::string(prefix) + " ";
    line += body;
    if (*suffix) line += std::string(" ") + suffix;
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace wlmsc

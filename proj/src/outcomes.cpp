#include "dosefind/outcomes.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>

#include "dosefind/errors.hpp"

namespace dosefind {

Alphabet alphabet_of(Event e) noexcept {
  return (e == Event::no_tox || e == Event::tox) ? Alphabet::binary : Alphabet::quaternary;
}

bool has_toxicity(Event e) noexcept {
  return e == Event::tox || e == Event::toxicity_only || e == Event::both;
}

bool has_efficacy(Event e) noexcept { return e == Event::efficacy_only || e == Event::both; }

char event_code(Event e) noexcept {
  switch (e) {
    case Event::no_tox:
    case Event::neither:
      return 'N';
    case Event::tox:
    case Event::toxicity_only:
      return 'T';
    case Event::efficacy_only:
      return 'E';
    case Event::both:
      return 'B';
  }
  return '?';
}

Event event_from_code(char code, Alphabet alphabet) {
  if (alphabet == Alphabet::binary) {
    if (code == 'N') return Event::no_tox;
    if (code == 'T') return Event::tox;
  } else {
    switch (code) {
      case 'E':
        return Event::efficacy_only;
      case 'T':
        return Event::toxicity_only;
      case 'B':
        return Event::both;
      case 'N':
        return Event::neither;
      default:
        break;
    }
  }
  throw ValidationError(std::string("outcome character '") + code + "' is not in the " +
                        std::string(alphabet_name(alphabet)) + " alphabet");
}

std::string_view alphabet_name(Alphabet a) noexcept {
  return a == Alphabet::binary ? "binary (T/N)" : "efficacy-toxicity (E/T/B/N)";
}

void OutcomeSequence::push_back(int dose_level, Event event, double weight) {
  if (dose_level < 1) throw ValidationError("dose level must be >= 1", "dose_level");
  if (!(weight >= 0.0 && weight <= 1.0)) throw ValidationError("weight must lie in [0, 1]", "weights");
  if (alphabet_of(event) != alphabet_)
    throw ValidationError("event does not belong to the sequence alphabet");
  records_.push_back({static_cast<int>(records_.size()) + 1, dose_level, event, weight});
}

void OutcomeSequence::append_cohort(int dose_level, std::string_view codes) {
  for (char c : codes) push_back(dose_level, event_from_code(c, alphabet_));
}

void OutcomeSequence::append(const OutcomeSequence &other) {
  if (other.alphabet_ != alphabet_) throw ValidationError("cannot mix outcome alphabets");
  for (const auto &r : other.records_) push_back(r.dose_level, r.event, r.weight);
}

std::vector<int> OutcomeSequence::dose_levels() const {
  std::vector<int> out;
  out.reserve(records_.size());
  for (const auto &r : records_) out.push_back(r.dose_level);
  return out;
}

int OutcomeSequence::max_dose_level() const noexcept {
  int m = 0;
  for (const auto &r : records_) m = std::max(m, r.dose_level);
  return m;
}

int OutcomeSequence::min_dose_level() const noexcept {
  if (records_.empty()) return 0;
  int m = records_.front().dose_level;
  for (const auto &r : records_) m = std::min(m, r.dose_level);
  return m;
}

bool OutcomeSequence::all_unit_weight() const noexcept {
  return std::all_of(records_.begin(), records_.end(), [](const auto &r) { return r.weight == 1.0; });
}

namespace {

// Length in bytes of a UTF-8 whitespace sequence starting at s[i], 0 if none.
std::size_t whitespace_len(std::string_view s, std::size_t i) {
  const auto c = static_cast<unsigned char>(s[i]);
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') return 1;
  auto byte = [&](std::size_t k) -> unsigned {
    return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u;
  };
  if (c == 0xC2 && (byte(1) == 0x85 || byte(1) == 0xA0)) return 2;      // NEL, NBSP
  if (c == 0xE1 && byte(1) == 0x9A && byte(2) == 0x80) return 3;        // U+1680
  if (c == 0xE2 && byte(1) == 0x80) {
    const unsigned b = byte(2);
    if ((b >= 0x80 && b <= 0x8A) || b == 0xA8 || b == 0xA9 || b == 0xAF) return 3;
  }
  if (c == 0xE2 && byte(1) == 0x81 && byte(2) == 0x9F) return 3;        // U+205F
  if (c == 0xE3 && byte(1) == 0x80 && byte(2) == 0x80) return 3;        // U+3000
  return 0;
}

[[noreturn]] void token_error(std::size_t position, std::string_view token, const std::string &what) {
  throw ValidationError("token " + std::to_string(position) + " ('" + std::string(token) + "'): " + what,
                        "outcomes");
}

}  // namespace

OutcomeSequence parse_outcomes(std::string_view text, Alphabet alphabet) {
  OutcomeSequence seq(alphabet);
  std::size_t i = 0;
  std::size_t position = 0;
  while (i < text.size()) {
    if (const auto ws = whitespace_len(text, i); ws > 0) {
      i += ws;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() && whitespace_len(text, i) == 0) ++i;
    const std::string_view token = text.substr(start, i - start);
    ++position;

    std::size_t digits = 0;
    while (digits < token.size() && token[digits] >= '0' && token[digits] <= '9') ++digits;
    if (digits == 0) token_error(position, token, "expected an integer dose-level prefix");
    if (digits == token.size()) token_error(position, token, "dose-level has no outcome characters");

    int dose = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + digits, dose);
    if (ec != std::errc{} || ptr != token.data() + digits)
      token_error(position, token, "dose-level is not a valid integer");
    if (dose < 1) token_error(position, token, "dose-level must be >= 1");

    for (char c : token.substr(digits)) {
      Event e{};
      try {
        e = event_from_code(c, alphabet);
      } catch (const ValidationError &err) {
        token_error(position, token, err.what());
      }
      seq.push_back(dose, e);
    }
  }
  return seq;
}

std::string serialize_outcomes(const OutcomeSequence &seq) {
  if (!seq.all_unit_weight())
    throw ValidationError("weighted outcome sequences have no string form; use the vector form", "weights");
  std::string out;
  int current = 0;
  for (const auto &r : seq.records()) {
    if (r.dose_level != current) {
      if (!out.empty()) out += ' ';
      out += std::to_string(r.dose_level);
      current = r.dose_level;
    }
    out += event_code(r.event);
  }
  return out;
}

OutcomeSequence from_vectors(std::span<const int> doses, std::span<const int> tox,
                             std::span<const double> weights) {
  if (doses.size() != tox.size() || doses.size() != weights.size())
    throw ValidationError("doses, tox and weights must have equal lengths", "weights");
  OutcomeSequence seq(Alphabet::binary);
  for (std::size_t i = 0; i < doses.size(); ++i) {
    if (tox[i] != 0 && tox[i] != 1) throw ValidationError("tox values must be 0 or 1", "tox");
    seq.push_back(doses[i], tox[i] ? Event::tox : Event::no_tox, weights[i]);
  }
  return seq;
}

}  // namespace dosefind

#pragma once

// Dose-finding outcome strings such as "1NNN 2TNT" (toxicity only) or
// "1NN 2EB" (efficacy and toxicity). Each whitespace-separated token is a
// dose-level followed by one character per patient in the cohort.

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dosefind {

enum class Alphabet { binary, quaternary };

enum class Event {
  // binary alphabet
  no_tox,  // N
  tox,     // T
  // quaternary alphabet
  efficacy_only,  // E
  toxicity_only,  // T
  both,           // B
  neither,        // N
};

[[nodiscard]] Alphabet alphabet_of(Event e) noexcept;
[[nodiscard]] bool has_toxicity(Event e) noexcept;
[[nodiscard]] bool has_efficacy(Event e) noexcept;
[[nodiscard]] char event_code(Event e) noexcept;
// Throws ValidationError if `code` is not in `alphabet`.
[[nodiscard]] Event event_from_code(char code, Alphabet alphabet);
[[nodiscard]] std::string_view alphabet_name(Alphabet a) noexcept;

struct PatientRecord {
  int patient = 1;     // 1-based
  int dose_level = 1;  // 1-based
  Event event = Event::no_tox;
  double weight = 1.0;

  friend bool operator==(const PatientRecord &, const PatientRecord &) = default;
};

class OutcomeSequence {
 public:
  explicit OutcomeSequence(Alphabet alphabet = Alphabet::binary) : alphabet_(alphabet) {}

  [[nodiscard]] Alphabet alphabet() const noexcept { return alphabet_; }
  [[nodiscard]] const std::vector<PatientRecord> &records() const noexcept { return records_; }
  [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
  [[nodiscard]] bool empty() const noexcept { return records_.empty(); }

  // Appends one patient; patient index is assigned automatically.
  void push_back(int dose_level, Event event, double weight = 1.0);
  // Appends a cohort given as outcome codes, e.g. append_cohort(3, "NNT").
  void append_cohort(int dose_level, std::string_view codes);
  void append(const OutcomeSequence &other);

  [[nodiscard]] std::vector<int> dose_levels() const;
  [[nodiscard]] int max_dose_level() const noexcept;  // 0 when empty
  [[nodiscard]] int min_dose_level() const noexcept;  // 0 when empty
  [[nodiscard]] bool all_unit_weight() const noexcept;

  friend bool operator==(const OutcomeSequence &, const OutcomeSequence &) = default;

 private:
  Alphabet alphabet_;
  std::vector<PatientRecord> records_;
};

// Errors carry the 1-based token position: "token 2 ('2TXT'): ...".
[[nodiscard]] OutcomeSequence parse_outcomes(std::string_view text, Alphabet alphabet);

// Groups consecutive same-dose patients into cohort tokens. Throws
// ValidationError for weighted sequences, which have no string form.
[[nodiscard]] std::string serialize_outcomes(const OutcomeSequence &seq);

// Vector form used for weighted (TITE) data; events are 0/1 toxicity flags.
[[nodiscard]] OutcomeSequence from_vectors(std::span<const int> doses, std::span<const int> tox,
                                           std::span<const double> weights);

}  // namespace dosefind

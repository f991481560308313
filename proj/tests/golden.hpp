#pragma once

#include <array>
#include <string_view>

#include "kgsmith/qa.hpp"

namespace golden {

struct IntentCase {
  std::string_view question;
  kgsmith::Intent intent;
};

// One example question per supported question-type row.
inline constexpr std::array<IntentCase, 12> intent_examples = {{
    {"What are the symptoms of breast cancer?", kgsmith::Intent::disease_symptom},
    {"What should I do if I have a runny nose lately?", kgsmith::Intent::symptom_disease},
    {"Why do I suffer from insomnia?", kgsmith::Intent::disease_cause},
    {"What are the complications of insomnia?", kgsmith::Intent::disease_complication},
    {"What should people who have insomnia not eat?", kgsmith::Intent::disease_not_food},
    {"What to eat if you have insomnia?", kgsmith::Intent::disease_do_food},
    {"Who is better off not eating honey?", kgsmith::Intent::food_avoid_disease},
    {"What are the benefits of goose meat?", kgsmith::Intent::food_benefit_disease},
    {"What medications should I take for liver disease?", kgsmith::Intent::disease_drug},
    {"What can I do to prevent insomnia?", kgsmith::Intent::disease_prevent},
    {"Who is susceptible to hypertension?", kgsmith::Intent::disease_susceptible},
    {"Disease description Diabetes", kgsmith::Intent::disease_describe},
}};

struct AnswerCase {
  std::string_view question;
  std::string_view answer;
};

inline constexpr std::array<AnswerCase, 3> answer_examples = {{
    {"What should I do to treat hypertension?",
     "Hypertension can try the following treatments: medication; surgery; supportive therapy"},
    {"Who is susceptible to hypertension?",
     "People who are susceptible to hypertension include: people with a family history of hypertension, poor "
     "lifestyle habits, and lack of exercise"},
    {"What should people who have insomnia not eat?", "Foods to avoid for insomnia include: doughnuts; mussels; lard"},
}};

} // namespace golden

#pragma once

#include <array>
#include <string_view>

#include "temadapter/template_engine.hpp"

namespace temadapter::testing {

struct GoldenTriple {
  std::string_view question;
  std::string_view answer;
  std::string_view sentence;
  QuestionKind kind;
};

// Reference question/answer/sentence triples for the template engine.
inline constexpr std::array<GoldenTriple, 39> kGoldenCorpus{{
    {"Which area has been damaged on the vehicle being hit?", "Back",
     "Back has been damaged on the vehicle being hit.", QuestionKind::kWh},
    {"Which area has been damaged on the vehicle being hit?", "Front",
     "Front has been damaged on the vehicle being hit.", QuestionKind::kWh},
    {"Which area has been damaged on the vehicle being hit?", "Side",
     "Side has been damaged on the vehicle being hit.", QuestionKind::kWh},

    {"What could possibly cause this accident?", "Obstructed by unexpected objects",
     "Obstructed by unexpected objects could possibly cause this accident.", QuestionKind::kWh},
    {"What could possibly cause this accident?", "Sudden braking of a vehicle",
     "Sudden braking of a vehicle could possibly cause this accident.", QuestionKind::kWh},
    {"What could possibly cause this accident?", "Violation of traffic rules by pedestrians",
     "Violation of traffic rules by pedestrians could possibly cause this accident.",
     QuestionKind::kWh},
    {"What could possibly cause this accident?", "Sudden or extreme movement by a vehicle",
     "Sudden or extreme movement by a vehicle could possibly cause this accident.",
     QuestionKind::kWh},

    {"Can this road infrastructure prevent head-on collision?", "No, the road is unmarked",
     "This road infrastructure cannot prevent head-on collision, the road is unmarked.",
     QuestionKind::kYesNo},
    {"Can this road infrastructure prevent head-on collision?",
     "Yes, the divider between two directions is marked clearly",
     "This road infrastructure can prevent head-on collision, the divider between two "
     "directions is marked clearly.",
     QuestionKind::kYesNo},

    {"Would the accident still occur if the driver slows down in time?", "Yes",
     "The accident still occur if the driver slows down in time.", QuestionKind::kYesNo},
    {"Would the accident still occur if the driver slows down in time?", "No",
     "The accident would not occur if the driver slows down in time.", QuestionKind::kYesNo},

    {"Which could be the reason for this accident?", "Traffic light violation",
     "Traffic light violation could be the reason for this accident.", QuestionKind::kWh},
    {"Which could be the reason for this accident?", "Retrograde vehicles",
     "Retrograde vehicles could be the reason for this accident.", QuestionKind::kWh},
    {"Which could be the reason for this accident?", "Improper lane change",
     "Improper lane change could be the reason for this accident.", QuestionKind::kWh},
    {"Which could be the reason for this accident?", "Obstructed view or limited visibility",
     "Obstructed view or limited visibility could be the reason for this accident.",
     QuestionKind::kWh},

    {"How much damage will the vehicle(s) receive after collision?", "Nearly no damage",
     "The vehicle (s) will receive nearly no damage after collision.", QuestionKind::kHowMany},
    {"How much damage will the vehicle(s) receive after collision?", "Significant deformation",
     "The vehicle (s) will receive significant deformation after collision.",
     QuestionKind::kHowMany},
    {"How much damage will the vehicle(s) receive after collision?", "Some scratches",
     "The vehicle (s) will receive some scratches after collision.", QuestionKind::kHowMany},

    {"Where was the video taken?", "A crossroad", "The video was taken in a crossroad.",
     QuestionKind::kWh},
    {"Where was the video taken?", "The countryside", "The video was taken in the countryside.",
     QuestionKind::kWh},
    {"Where was the video taken?", "Road in the city", "The video was taken in the city.",
     QuestionKind::kWh},
    {"Where was the video taken?", "Forest", "The video was taken in Forest.", QuestionKind::kWh},

    {"Why did the accident occur when the road is clear?", "Vehicle malfunction.",
     "The accident occurred when the road is clear because of vehicle malfunction.",
     QuestionKind::kWh},
    {"Why did the accident occur when the road is clear?",
     "Trying to avoid something on the road.",
     "The accident occurred when the road is clear because of trying to avoid something on "
     "the road.",
     QuestionKind::kWh},
    {"Why did the accident occur when the road is clear?",
     "Driver was not paying attention to the road.",
     "The accident occurred when the road is clear because driver was not paying attention to "
     "the road.",
     QuestionKind::kWh},
    {"Why did the accident occur when the road is clear?", "Uneven road, full of potholes.",
     "The accident occurred when the road is clear because of uneven road, full of potholes.",
     QuestionKind::kWh},

    {"How did the truck get involved in the accident?", "The truck is being hit from behind.",
     "The truck get involved in the accident by being hit from behind.", QuestionKind::kWh},
    {"How did the truck get involved in the accident?", "The truck is being hit from the side.",
     "The truck get involved in the accident by being hit from the side.", QuestionKind::kWh},

    {"How many lanes does the road have in single direction?", "Two",
     "The road has two in single direction.", QuestionKind::kHowMany},
    {"How many lanes does the road have in single direction?", "Only one",
     "The road has only one in single direction.", QuestionKind::kHowMany},
    {"How many lanes does the road have in single direction?", "Three to five",
     "The road has three to five in single direction.", QuestionKind::kHowMany},

    {"What's the condition of the road surface?", "The road is wet.",
     "The condition of the road surface is wet.", QuestionKind::kWhats},
    {"What's the condition of the road surface?", "The road is covered by snow and ice.",
     "The condition of the road surface is covered by snow and ice.", QuestionKind::kWhats},
    {"What's the condition of the road surface?", "The road is smooth and clean.",
     "The condition of the road surface is smooth and clean.", QuestionKind::kWhats},
    {"What's the condition of the road surface?", "The road is dusty or muddy.",
     "The condition of the road surface is dusty or muddy.", QuestionKind::kWhats},

    {"Are there any trees along the road?", "Yes", "There are some trees along the road.",
     QuestionKind::kYesNo},
    {"Are there any trees along the road?", "No", "There are not any trees along the road.",
     QuestionKind::kYesNo},

    {"Did a car violate the traffic light?", "Yes", "A car violated the traffic light.",
     QuestionKind::kYesNo},
    {"Did a car violate the traffic light?", "No", "A car did not violate the traffic light.",
     QuestionKind::kYesNo},
}};

}  // namespace temadapter::testing

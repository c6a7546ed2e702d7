#pragma once

// Hand-checked expected outputs shared by the unit and acceptance suites.

#include <string>
#include <vector>

#include "litpipe/bibkit.hpp"

namespace litpipe::testing {

struct ApaGolden {
    std::string name;
    BibRecord record;
    std::string reference;
    std::string intext;
};

inline BibRecord make_record(std::vector<Author> authors, std::optional<int> year, std::string title,
                             std::optional<std::string> venue = {}, std::optional<std::string> doi = {}) {
    BibRecord r;
    r.id = "golden";
    r.authors = std::move(authors);
    r.year = year;
    r.title = std::move(title);
    r.venue = std::move(venue);
    r.doi = std::move(doi);
    return r;
}

inline std::vector<Author> numbered_authors(int n) {
    std::vector<Author> out;
    for (int i = 1; i <= n; ++i) {
        out.push_back({"Author" + std::string(i < 10 ? "0" : "") + std::to_string(i), "Xu"});
    }
    return out;
}

inline std::vector<ApaGolden> apa_goldens() {
    return {
        {"one_author", make_record({{"Smith", "Ann"}}, 2020, "On X", "J. Y"), "Smith, A. (2020). On X. J. Y.",
         "(Smith, 2020)"},
        {"no_given_no_year", make_record({{"Smith", std::nullopt}}, std::nullopt, "On X"), "Smith. (n.d.). On X.",
         "(Smith, n.d.)"},
        {"no_authors", make_record({}, 2021, "Anon note"), "Anon note. (2021).", "(Anon note, 2021)"},
        {"two_authors_doi", make_record({{"Smith", "Ann"}, {"Lee", "Bo"}}, 2020, "Paired work", "Journal of Z",
                                        "https://doi.org/10.1000/ABC.9"),
         "Smith, A., & Lee, B. (2020). Paired work. Journal of Z. https://doi.org/10.1000/abc.9",
         "(Smith & Lee, 2020)"},
        {"three_authors_no_year",
         make_record({{"Smith", "Ann"}, {"Lee", "Bo"}, {"Park", "Chan"}}, std::nullopt, "Triple study", "Proc. W"),
         "Smith, A., Lee, B., & Park, C. (n.d.). Triple study. Proc. W.", "(Smith et al., n.d.)"},
        {"twenty_authors", make_record(numbered_authors(20), 2019, "Big team paper", "Nature"),
         "Author01, X., Author02, X., Author03, X., Author04, X., Author05, X., Author06, X., Author07, X., "
         "Author08, X., Author09, X., Author10, X., Author11, X., Author12, X., Author13, X., Author14, X., "
         "Author15, X., Author16, X., Author17, X., Author18, X., Author19, X., & Author20, X. (2019). "
         "Big team paper. Nature.",
         "(Author01 et al., 2019)"},
        {"twenty_one_authors", make_record(numbered_authors(21), 2019, "Consortium paper", "Nature"),
         "Author01, X., Author02, X., Author03, X., Author04, X., Author05, X., Author06, X., Author07, X., "
         "Author08, X., Author09, X., Author10, X., Author11, X., Author12, X., Author13, X., Author14, X., "
         "Author15, X., Author16, X., Author17, X., Author18, X., Author19, X., . . . Author21, X. (2019). "
         "Consortium paper. Nature.",
         "(Author01 et al., 2019)"},
        {"twenty_five_authors", make_record(numbered_authors(25), std::nullopt, "Atlas release"),
         "Author01, X., Author02, X., Author03, X., Author04, X., Author05, X., Author06, X., Author07, X., "
         "Author08, X., Author09, X., Author10, X., Author11, X., Author12, X., Author13, X., Author14, X., "
         "Author15, X., Author16, X., Author17, X., Author18, X., Author19, X., . . . Author25, X. (n.d.). "
         "Atlas release.",
         "(Author01 et al., n.d.)"},
        {"no_venue_question_title",
         make_record({{"Nguyen", "Thi Lan"}}, 2018, "Does it work?", std::nullopt, "doi:10.1234/XYZ"),
         "Nguyen, T. L. (2018). Does it work? https://doi.org/10.1234/xyz", "(Nguyen, 2018)"},
        {"hyphenated_given", make_record({{"Sartre", "Jean-Paul"}}, 1943, "Being and nothingness.", "Gallimard"),
         "Sartre, J.-P. (1943). Being and nothingness. Gallimard.", "(Sartre, 1943)"},
        {"no_authors_no_year_venue", make_record({}, std::nullopt, "Style manual", "House Press"),
         "Style manual. (n.d.). House Press.", "(Style manual, n.d.)"},
        {"non_ascii", make_record({{"Müller", "Émile"}, {"Østergård", "åse"}}, 2022, "Über Messung", "Zeitschrift"),
         "Müller, É., & Østergård, Å. (2022). Über Messung. Zeitschrift.", "(Müller & Østergård, 2022)"},
    };
}

struct PlantedQuestion {
    std::string question;
    std::string answer;
};

/// Questions about fixtures/planted/instrument.pdf; each answer string sits in
/// exactly one section of that document.
inline std::vector<PlantedQuestion> planted_questions() {
    return {
        {"What was the mean error for stride length?", "The mean error was 4.2 mm"},
        {"What sampling rate did the sensor use?", "sampling rate of 250 Hz"},
        {"How many volunteers were enrolled in the calibration study?", "Thirty-two volunteers were enrolled"},
        {"What battery life did the device achieve?", "battery life of 19 hours"},
        {"What was the housing machined from?", "anodised aluminium"},
    };
}

}  // namespace litpipe::testing

#include "outlook/synthetic.hpp"

#include "outlook/io.hpp"
#include "outlook/logistic.hpp"
#include "outlook/pseudo_embedder.hpp"

#include <cmath>
#include <map>

namespace outlook
{

namespace
{

using Words = std::vector<std::string>;

const Words kPositive{
    "aufschwung", "wachstum",     "zuversicht",  "erholung",    "gewinn",      "gewinne",      "boom",
    "optimismus", "expansion",    "rekord",      "zunahme",     "steigerung",  "aufwärtstrend", "belebung",
    "stabilität", "fortschritt",  "erfolg",      "erfolgreich", "robust",      "solide",       "stark",
    "kräftig",    "dynamisch",    "positiv",     "günstig",     "lichtblick",  "hoffnung",     "anstieg",
    "zuwachs",    "überschuss",   "rekordhoch",  "aufbruch",    "chancen",     "investitionen", "einstellungen",
    "nachfragehoch", "blühend",   "vertrauen",   "entspannung", "verbesserung", "rückenwind",  "hochkonjunktur",
    "gewachsen",  "zulegen",      "steigend",    "profitabel",  "innovation",  "aufholen",     "rekordumsatz",
    "freundlich"};

const Words kNegative{
    "rezession",   "krise",       "abschwung",   "verlust",      "verluste",    "entlassungen", "pessimismus",
    "einbruch",    "konkurs",     "sinkend",     "unsicherheit", "rückgang",    "flaute",       "stagnation",
    "schwäche",    "schwach",     "defizit",     "pleite",       "abbau",       "stellenabbau", "kurzarbeit",
    "inflationssorgen", "risiko", "risiken",     "gefahr",       "warnung",     "sorgen",       "angst",
    "düster",      "negativ",     "belastung",   "gegenwind",    "einbussen",   "minus",        "tief",
    "tiefpunkt",   "absturz",     "zusammenbruch", "eintrübung", "kollaps",     "insolvenz",    "schulden",
    "überschuldung", "abwärtstrend", "talfahrt", "dämpfer",      "rückschlag",  "engpass",      "teuerung",
    "crash"};

const std::map<Sector, Words>& sector_words()
{
  static const std::map<Sector, Words> w{
      {Sector::general, {"wirtschaft", "schweiz", "markt", "entwicklung", "lage", "branche", "sektor", "quartal", "jahr", "bericht"}},
      {Sector::financial_markets, {"börse", "aktien", "anleihen", "zinsen", "bank", "banken", "kurs", "franken", "devisen", "investoren"}},
      {Sector::labor_market, {"arbeitsmarkt", "arbeitslosigkeit", "stellen", "löhne", "beschäftigung", "fachkräfte", "arbeitnehmer", "gewerkschaft", "lohn", "jobs"}},
      {Sector::real_estate, {"immobilien", "mieten", "hypotheken", "wohnungen", "bauwirtschaft", "eigenheim", "grundstück", "bauprojekte", "wohneigentum", "leerstand"}},
      {Sector::international_trade, {"export", "exporte", "import", "zoll", "zölle", "handel", "freihandel", "ausfuhren", "handelsbilanz", "tarife"}},
      {Sector::consumption, {"konsum", "detailhandel", "kaufkraft", "konsumenten", "einkaufen", "haushalte", "ausgaben", "detailhändler", "konsumstimmung", "tourismus"}},
      {Sector::business_situation, {"unternehmen", "auftragslage", "industrie", "produktion", "umsatz", "firmen", "maschinenindustrie", "aufträge", "kmu", "margen"}},
      {Sector::macro_outlook, {"konjunktur", "bip", "prognose", "inflation", "nationalbank", "seco", "leitzins", "teuerungsrate", "ökonomen", "konjunkturprognose"}},
  };
  return w;
}

const Words kStopDe{"der", "die", "das", "und", "ist", "in", "mit", "auf", "für", "von", "zu", "es", "ein", "eine", "nicht",
                    "auch", "sich", "dem", "den", "im", "sie", "er", "wird", "hat", "wie", "nach", "bei", "aus", "noch", "über"};
const Words kStopFr{"le", "la", "les", "et", "est", "dans", "avec", "sur", "pour", "de", "du", "des", "un", "une", "pas",
                    "aussi", "se", "au", "il", "elle", "qui", "que", "par", "mais", "ou", "en", "ce", "son", "sa", "cette"};
const Words kOffTopic{"fussball", "tor", "spiel", "konzert", "theater", "film", "mannschaft", "saison", "festival", "museum",
                      "trainer", "liga", "meisterschaft", "ausstellung", "premiere", "spieler", "niederlage", "oper", "roman", "bühne"};

const Words kEconomicSections{"Wirtschaft", "Finanzen", "Märkte"};
const Words kOtherSections{"Sport", "Kultur", "Panorama"};
const Words kOutlets{"Tagesblatt", "Finanzpost", "Le Quotidien"};

const std::string& pick(const Words& w, Rng& rng) { return w[uniform_index(rng, w.size())]; }

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::string join_words(const Words& w)
{
  std::string s;
  for (const auto& x : w) {
    if (!s.empty()) s += ' ';
    s += x;
  }
  return s;
}

Sector random_sector(Rng& rng) { return kAllSectors[uniform_index(rng, kAllSectors.size())]; }

// Economic text whose sentiment words are positive with probability q.
Words economic_words(Rng& rng, std::size_t length, Sector sector, double q, double sentiment_share, double sector_share,
                     const Words& filler)
{
  Words out;
  const auto& own = sector_words().at(sector);
  const auto& general = sector_words().at(Sector::general);
  for (std::size_t k = 0; k < length; ++k) {
    const double r = uniform_real(rng);
    if (r < sentiment_share) {
      out.push_back(uniform_real(rng) < q ? pick(kPositive, rng) : pick(kNegative, rng));
    } else if (r < sentiment_share + sector_share) {
      out.push_back(pick(own, rng));
    } else if (r < sentiment_share + sector_share + 0.1) {
      out.push_back(pick(general, rng));
    } else if (r < sentiment_share + sector_share + 0.15) {
      out.push_back(pick(sector_words().at(random_sector(rng)), rng));
    } else {
      out.push_back(pick(filler, rng));
    }
  }
  return out;
}

Words offtopic_words(Rng& rng, std::size_t length, const Words& filler)
{
  Words out;
  for (std::size_t k = 0; k < length; ++k) {
    const double r = uniform_real(rng);
    if (r < 0.35) out.push_back(pick(kOffTopic, rng));
    else if (r < 0.40) out.push_back(uniform_real(rng) < 0.5 ? pick(kPositive, rng) : pick(kNegative, rng));
    else if (r < 0.45) out.push_back(pick(sector_words().at(Sector::general), rng));
    else out.push_back(pick(filler, rng));
  }
  return out;
}

std::size_t length_between(Rng& rng, std::size_t lo, std::size_t hi) { return lo + uniform_index(rng, hi - lo + 1); }

}  // namespace

std::set<std::string> synthetic_economic_sections() { return {kEconomicSections.begin(), kEconomicSections.end()}; }
const std::vector<std::string>& synthetic_positive_words() { return kPositive; }
const std::vector<std::string>& synthetic_negative_words() { return kNegative; }
const std::vector<std::string>& synthetic_stopwords(Language language) { return language == Language::de ? kStopDe : kStopFr; }

JoinedCorpus SyntheticWorld::joined() const { return join(articles, embeddings); }

JoinedCorpus SyntheticWorld::joined_economic() const
{
  std::vector<Article> econ;
  for (std::size_t i = 0; i < articles.size(); ++i)
    if (economic[i]) econ.push_back(articles[i]);
  return join(std::move(econ), embeddings);
}

SyntheticWorld make_synthetic_world(const SyntheticOptions& o)
{
  if (o.months < 1 || o.articles < static_cast<std::size_t>(o.months)) throw Error("synthetic world needs at least one article per month");
  SyntheticWorld w;
  w.options = o;
  Rng rng(mix_seed(o.seed, 0x5e17));

  double state = standard_normal(rng);
  for (int t = 0; t < o.months; ++t) {
    if (t > 0) state = 0.7 * state + std::sqrt(1 - 0.49) * standard_normal(rng);
    w.outlook.push_back(state);
  }

  std::vector<std::pair<std::uint64_t, std::string>> texts;
  for (std::size_t i = 0; i < o.articles; ++i) {
    Article a;
    a.id = 100001 + i;
    const int t = static_cast<int>(i * static_cast<std::size_t>(o.months) / o.articles);
    const YearMonth ym = o.start.next(t);
    a.date = std::chrono::year{ym.year} / std::chrono::month{ym.month} /
             std::chrono::day{static_cast<unsigned>(1 + uniform_index(rng, ym.days()))};
    a.language = uniform_real(rng) < o.french_share ? Language::fr : Language::de;
    a.outlet = a.language == Language::fr ? kOutlets[2] : kOutlets[uniform_index(rng, 2)];
    a.pubtype = uniform_real(rng) < 0.7 ? PubType::print : PubType::online;
    const Words& filler = a.language == Language::de ? kStopDe : kStopFr;

    const bool economic = uniform_real(rng) >= o.irrelevant_share;
    Sector sector = Sector::general;
    double q = 0.5;
    Words body, title;
    if (economic) {
      sector = random_sector(rng);
      q = logistic(2.0 * w.outlook[static_cast<std::size_t>(t)] + standard_normal(rng));
      body = economic_words(rng, length_between(rng, 40, 80), sector, q, 0.22, 0.2, filler);
      title = economic_words(rng, 5, sector, q, 0.3, 0.4, filler);
    } else {
      body = offtopic_words(rng, length_between(rng, 40, 80), filler);
      title = offtopic_words(rng, 5, filler);
    }
    const bool flipped = uniform_real(rng) < o.section_noise;
    const bool filed_economic = economic != flipped;
    if (uniform_real(rng) >= o.missing_section_share)
      a.section = pick(filed_economic ? kEconomicSections : kOtherSections, rng);
    a.title = join_words(title);
    a.body = join_words(body);
    if (!a.title.empty() && a.title[0] >= 'a' && a.title[0] <= 'z') a.title[0] = static_cast<char>(a.title[0] - 'a' + 'A');

    texts.emplace_back(a.id, a.text());
    w.articles.push_back(std::move(a));
    w.economic.push_back(economic ? 1 : 0);
    w.sectors.push_back(sector);
    w.article_polarity.push_back(q);
  }

  std::uint64_t anchor_id = 1;
  std::vector<std::pair<std::uint64_t, std::string>> anchor_texts;
  for (auto sector : kAllSectors)
    for (int polarity : {1, 0})
      for (std::size_t k = 0; k < o.anchors_per_sector_class; ++k) {
        AnchorArticle an;
        an.id = anchor_id++;
        an.polarity = polarity;
        an.sector = sector;
        an.text = join_words(economic_words(rng, length_between(rng, 50, 70), sector, polarity ? 1.0 : 0.0, 0.6, 0.25, kStopDe));
        anchor_texts.emplace_back(an.id, an.text);
        w.anchors.push_back(std::move(an));
      }

  const PseudoEmbedder embedder(o.dimension, mix_seed(o.seed, 0xe3b));
  w.embeddings = embedder.embed_all(texts);
  w.anchor_embeddings = embedder.embed_all(anchor_texts);

  w.gdp.yoy.kind = SeriesKind::gdp_yoy;
  w.gdp.qoq.kind = SeriesKind::gdp_qoq;
  std::map<Quarter, std::vector<double>> by_quarter;
  for (int t = 0; t < o.months; ++t) by_quarter[Quarter::of(o.start.next(t))].push_back(w.outlook[static_cast<std::size_t>(t)]);
  for (const auto& [q, v] : by_quarter) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    const double yoy = 1.5 + 1.2 * mean + 0.3 * standard_normal(rng);
    w.gdp.yoy.push(q, yoy);
    w.gdp.qoq.push(q, yoy / 4 + 0.1 * standard_normal(rng));
  }
  return w;
}

std::string synthetic_lexicon_text()
{
  std::string s = "# demonstration lexicon, German\n";
  for (const auto& w : kPositive) s += w + "\tpositive\n";
  for (const auto& w : kNegative) s += w + "\tnegative\n";
  return s;
}

std::string synthetic_topics_text()
{
  return "# topic = keywords, in priority order\n"
         "Trade = zoll, zölle, tarife, freihandel, export*, import*, ausfuhren, droits de douane\n"
         "Labor market = arbeitsmarkt, arbeitslosigkeit, stellen, löhne, fachkräfte\n"
         "Real estate = immobilien, hypotheken, mieten, wohnungen, wohneigentum\n"
         "Financial markets = börse, aktien, anleihen, zinsen, devisen\n"
         "Consumption = konsum, detailhandel, kaufkraft, konsumenten, konsumstimmung\n"
         "Industry = industrie, auftragslage, aufträge, produktion, maschinenindustrie\n";
}

void write_synthetic_fixture(const SyntheticWorld& world, const std::filesystem::path& dir)
{
  std::filesystem::create_directories(dir);
  write_corpus(dir / "corpus.jsonl", world.articles);
  write_store(world.embeddings, dir / "embeddings.emb");
  write_anchor_records(dir / "anchors.jsonl", world.anchors);
  write_store(world.anchor_embeddings, dir / "anchor_embeddings.emb");
  write_gdp_csv(world.gdp, dir / "gdp.csv");
  write_text(dir / "lexicon_de.tsv", synthetic_lexicon_text());
  write_text(dir / "topics.txt", synthetic_topics_text());
  write_text(dir / "stopwords_de.txt", join_words(kStopDe) + "\n");
  write_text(dir / "stopwords_fr.txt", join_words(kStopFr) + "\n");

  std::string sections;
  for (const auto& s : kEconomicSections) sections += (sections.empty() ? "" : ",") + s;
  const std::string config = "[paths]\n"
                             "corpus = corpus.jsonl\n"
                             "embeddings = embeddings.emb\n"
                             "anchors = anchors.jsonl\n"
                             "anchor_embeddings = anchor_embeddings.emb\n"
                             "gdp = gdp.csv\n"
                             "lexicon = lexicon_de.tsv\n"
                             "topics = topics.txt\n"
                             "stopwords_de = stopwords_de.txt\n"
                             "stopwords_fr = stopwords_fr.txt\n"
                             "output = out\n"
                             "\n[corpus]\n"
                             "filter = date_from=" + format_date(world.options.start.first_day()) + "\n"
                             "\n[relevance]\n"
                             "sections = " + sections + "\n"
                             "threshold = 0.8\n"
                             "lambda = 0.1\n"
                             "architecture = linear\n"
                             "hidden_width = 64\n"
                             "\n[sentiment]\n"
                             "lambda = 1\n"
                             "\n[decompose]\n"
                             "method = keyword\n"
                             "clusters = 8\n"
                             "reducer_dim = 10\n"
                             "top_terms = 20\n"
                             "\n[forecast]\n"
                             "month = 2\n"
                             "horizons = 0,1,2\n"
                             "initial_window = 8\n"
                             "\n[seeds]\n"
                             "seed = " + std::to_string(world.options.seed) + "\n";
  write_text(dir / "config.ini", config);
}

}  // namespace outlook

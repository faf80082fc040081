#include "oip/item_bank.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "oip/errors.hpp"
#include "oip/rng.hpp"

namespace oip {

namespace {
constexpr int kBankSize = 60;
constexpr int kItemsPerCategory = 10;
}  // namespace

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line, pending;
  bool in_quote = false;
  auto count_quotes = [](const std::string& s) {
    return std::count(s.begin(), s.end(), '"');
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (in_quote) {
      pending += "\n" + line;
    } else {
      pending = line;
    }
    in_quote = (count_quotes(pending) % 2) != 0;
    if (in_quote) continue;
    if (pending.empty()) continue;
    rows.push_back(parse_csv_line(pending));
  }
  if (in_quote) throw SchemaViolation("unterminated quote in " + path.string());
  return rows;
}

ItemBank ItemBank::load(const std::filesystem::path& path) {
  auto rows = read_csv(path);
  if (rows.empty()) throw SchemaViolation("empty item bank: " + path.string());

  const std::vector<std::string> expect = {"id", "category", "text_en", "text_zh"};
  if (rows[0] != expect)
    throw SchemaViolation("item bank header must be id,category,text_en,text_zh (got row 1 of " +
                          path.string() + ")");

  std::vector<Item> items;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto fail = [&](const std::string& what) {
      throw SchemaViolation("item bank row " + std::to_string(r + 1) + ": " + what);
    };
    if (row.size() != 4) fail("expected 4 fields, got " + std::to_string(row.size()));
    Item it;
    try {
      size_t pos = 0;
      it.id = std::stoi(row[0], &pos);
      if (pos != row[0].size()) fail("bad id '" + row[0] + "'");
    } catch (const std::exception&) {
      fail("bad id '" + row[0] + "'");
    }
    auto cat = category_from_name(row[1]);
    if (!cat) fail("unknown category '" + row[1] + "'");
    it.category = *cat;
    it.text_en = row[2];
    it.text_zh = row[3];
    if (it.text_en.empty()) fail("empty text_en");
    if (it.text_zh.empty()) fail("empty text_zh");
    items.push_back(std::move(it));
  }
  return from_items(std::move(items));
}

ItemBank ItemBank::from_items(std::vector<Item> items) {
  if (items.size() != kBankSize)
    throw SchemaViolation("item bank must have " + std::to_string(kBankSize) + " items, got " +
                          std::to_string(items.size()));

  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.id < b.id; });
  for (int i = 0; i < kBankSize; ++i) {
    if (items[size_t(i)].id != i + 1)
      throw SchemaViolation("item ids must be contiguous 1..60; missing or duplicate id near " +
                            std::to_string(i + 1));
    if (items[size_t(i)].text_en.empty() || items[size_t(i)].text_zh.empty())
      throw SchemaViolation("item " + std::to_string(items[size_t(i)].id) + " has empty text");
  }

  std::array<int, kNumCategories> counts{};
  for (const auto& it : items) counts[size_t(static_cast<int>(it.category))]++;
  for (int c = 0; c < kNumCategories; ++c) {
    if (counts[size_t(c)] != kItemsPerCategory) {
      std::ostringstream os;
      os << "expected " << kItemsPerCategory << " items per category, got";
      for (int j = 0; j < kNumCategories; ++j)
        os << " " << category_letter(static_cast<RiasecCategory>(j)) << "=" << counts[size_t(j)];
      throw CategoryCountMismatch(os.str());
    }
  }

  ItemBank bank;
  uint64_t fp = fnv1a64("item-bank-v1");
  for (const auto& it : items) {
    fp = splitmix64(fp ^ uint64_t(it.id));
    fp = splitmix64(fp ^ uint64_t(static_cast<int>(it.category)));
    fp = splitmix64(fp ^ fnv1a64(it.text_en));
    fp = splitmix64(fp ^ fnv1a64(it.text_zh));
  }
  bank.items_ = std::move(items);
  bank.fingerprint_ = fp;
  return bank;
}

const Item& ItemBank::by_id(int id) const {
  if (id < 1 || id > kBankSize) throw SchemaViolation("item id out of range: " + std::to_string(id));
  return items_[size_t(id - 1)];
}

}  // namespace oip

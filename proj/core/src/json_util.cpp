#include "json_util.hpp"

#include "multiop/errors.hpp"

namespace multiop::detail {

Json train_config_to_json(const TrainConfig& cfg) {
  return Json{
      {"loss", to_string(cfg.loss_kind)},
      {"epochs", cfg.epochs},
      {"batch_size", cfg.batch_size},
      {"lr",
       {{"initial", cfg.lr.initial},
        {"drop_epoch", cfg.lr.drop_epoch},
        {"drop_factor", cfg.lr.drop_factor}}},
      {"split_fraction", cfg.split_fraction},
      {"moi_cross_weight", cfg.moi_cross_weight},
      {"seed", cfg.seed},
      {"adam",
       {{"beta1", cfg.adam.beta1},
        {"beta2", cfg.adam.beta2},
        {"epsilon", cfg.adam.epsilon},
        {"weight_decay", cfg.adam.weight_decay}}},
  };
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig cfg;
  try {
    cfg.loss_kind = loss_kind_from_string(j.at("loss").get<std::string>());
    cfg.epochs = j.at("epochs").get<int>();
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    if (j.contains("lr")) {
      const Json& lr = j.at("lr");
      cfg.lr.initial = lr.at("initial").get<double>();
      cfg.lr.drop_epoch = lr.value("drop_epoch", cfg.epochs);
      cfg.lr.drop_factor = lr.value("drop_factor", 0.1);
    }
    cfg.split_fraction = j.value("split_fraction", cfg.split_fraction);
    cfg.moi_cross_weight = j.value("moi_cross_weight", cfg.moi_cross_weight);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("adam")) {
      const Json& adam = j.at("adam");
      cfg.adam.beta1 = adam.value("beta1", cfg.adam.beta1);
      cfg.adam.beta2 = adam.value("beta2", cfg.adam.beta2);
      cfg.adam.epsilon = adam.value("epsilon", cfg.adam.epsilon);
      cfg.adam.weight_decay = adam.value("weight_decay", cfg.adam.weight_decay);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("train config: ") + e.what());
  }
  return cfg;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  static const char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

} // namespace multiop::detail

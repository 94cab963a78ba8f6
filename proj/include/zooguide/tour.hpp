#pragma once

#include <memory>

#include "zooguide/content.hpp"
#include "zooguide/engine.hpp"
#include "zooguide/simulator.hpp"

namespace zooguide {

/// Feeds one replay item into a session: advance the clock to the item's
/// time, then hand over its fix if it carries one.
inline void feed(engine::Session& session, const simulator::ReplayItem& item) {
  session.on_tick(item.elapsed_s);
  if (auto fix = item.fix()) session.on_fix(*fix);
}

/// Headless tour: as-fast-as-possible replay of a stream through a fresh
/// session. The returned session holds the complete event log.
inline engine::Session run_tour(std::shared_ptr<const content::ContentPack> pack, const simulator::FixStream& stream,
                                engine::Config config = {}) {
  auto session = engine::new_session(std::move(pack), config);
  simulator::replay(stream, [&](const simulator::ReplayItem& item) { feed(session, item); });
  return session;
}

}  // namespace zooguide

#include "chainfleet/ledger/orderer.hpp"

#include <algorithm>

namespace chainfleet::ledger {

Orderer::Orderer(std::string channel, std::size_t batch_size, Millis batch_timeout, const Block& genesis)
    : channel_(std::move(channel)),
      batch_size_(batch_size),
      batch_timeout_(batch_timeout),
      next_number_(genesis.number + 1),
      prev_hash_(genesis.hash),
      last_cut_(genesis.cut_time) {}

void Orderer::enqueue(Transaction tx) {
  queue_.push_back(std::move(tx));
  max_queue_ = std::max(max_queue_, queue_.size());
}

Block Orderer::make_block(std::size_t count, Millis cut_time) {
  Block block;
  block.channel = channel_;
  block.number = next_number_++;
  block.prev_hash = prev_hash_;
  block.cut_time = std::max(cut_time, last_cut_);
  block.txs.assign(std::make_move_iterator(queue_.begin()),
                   std::make_move_iterator(queue_.begin() + static_cast<std::ptrdiff_t>(count)));
  queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(count));
  block.hash = block_hash(block);
  prev_hash_ = block.hash;
  last_cut_ = block.cut_time;
  return block;
}

std::vector<Block> Orderer::cut(Millis now) {
  std::vector<Block> blocks;
  while (!queue_.empty()) {
    const Millis timeout_at = queue_.front().submit_time + batch_timeout_;
    if (queue_.size() >= batch_size_) {
      Millis size_at = queue_.front().submit_time;
      for (std::size_t i = 0; i < batch_size_; ++i) size_at = std::max(size_at, queue_[i].submit_time);
      if (size_at <= timeout_at && size_at <= now) {
        blocks.push_back(make_block(batch_size_, size_at));
        continue;
      }
    }
    // Arrivals stamped exactly timeout_at may still come while now == timeout_at.
    if (timeout_at >= now) break;
    std::size_t count = 0;
    while (count < queue_.size() && count < batch_size_ && queue_[count].submit_time <= timeout_at) ++count;
    blocks.push_back(make_block(count, timeout_at));
  }
  return blocks;
}

}  // namespace chainfleet::ledger

// Sample model module for --mode model: any text-to-text function works.
module.exports.transform = function transform(input, _task) {
  return input.toUpperCase();
};

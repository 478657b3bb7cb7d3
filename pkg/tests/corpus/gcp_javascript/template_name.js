const { Storage } = require('@google-cloud/storage');

const storage = new Storage();

exports.handler = async (event) => {
  const file = storage.bucket(process.env.MEDIA_BUCKET).file(`thumbs/${event.name}.png`);
  await file.save(event.bytes);
  return { thumb: true };
};

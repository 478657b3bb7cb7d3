const { Storage } = require('@google-cloud/storage');

const storage = new Storage();

exports.handler = async () => {
  const [files] = await storage.bucket(process.env.INBOX_BUCKET).getFiles();
  return { count: files.length };
};

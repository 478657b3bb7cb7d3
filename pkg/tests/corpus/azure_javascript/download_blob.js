const { BlobServiceClient } = require('@azure/storage-blob');

const service = BlobServiceClient.fromConnectionString(process.env.STORAGE_CONN);

exports.handler = async () => {
  const container = service.getContainerClient('published');
  const blob = container.getBlobClient('data.bin');
  const payload = await blob.download();
  return { length: payload.contentLength };
};
